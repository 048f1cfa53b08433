#include "fairalloc/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fairalloc {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return mix64(seed ^ mix64(hash_label(label)));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    return mix64(derive_seed(seed, label) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

std::uint64_t Stream::below(std::uint64_t k) {
    if (k == 0) throw UsageError("cannot draw below zero");
    const std::uint64_t threshold = (0 - k) % k;
    for (;;) {
        std::uint64_t r = eng_();
        if (r >= threshold) return r % k;
    }
}

std::int64_t Stream::between(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw UsageError("empty draw range");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::vector<int> Stream::permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    shuffle(p);
    return p;
}

// Ternary alphabet {0, 1, end} at two bits per symbol: 00, 01, 10.
Bits encode_uint(std::uint64_t k) {
    Bits out;
    int top = 63;
    while (top > 0 && ((k >> top) & 1) == 0) --top;
    for (int b = top; b >= 0; --b) {
        out.push_back(false);
        out.push_back(((k >> b) & 1) != 0);
    }
    out.push_back(true);
    out.push_back(false);
    return out;
}

std::uint64_t decode_uint(const Bits& bits, std::size_t& pos) {
    std::uint64_t k = 0;
    int digits = 0;
    for (;;) {
        if (pos + 2 > bits.size()) throw ProtocolFailure("truncated integer code");
        bool hi = bits[pos], lo = bits[pos + 1];
        pos += 2;
        if (hi && !lo) break;
        if (hi && lo) throw ProtocolFailure("invalid symbol in integer code");
        if (++digits > 64) throw ProtocolFailure("integer code too long");
        k = (k << 1) | (lo ? 1u : 0u);
    }
    if (digits == 0) throw ProtocolFailure("integer code without digits");
    return k;
}

Bits encode_unary(std::uint64_t len) {
    if (len == 0) throw UsageError("unary code needs a positive length");
    Bits out(len, false);
    out.back() = true;
    return out;
}

std::uint64_t decode_unary(const Bits& bits, std::size_t& pos) {
    std::uint64_t len = 0;
    for (;;) {
        if (pos >= bits.size()) throw ProtocolFailure("truncated unary code");
        ++len;
        if (bits[pos++]) return len;
    }
}

int choice_width(std::uint64_t k) {
    if (k == 0) throw UsageError("choice among zero alternatives");
    int w = 0;
    while (w < 64 && (std::uint64_t{1} << w) < k) ++w;
    return w;
}

Bits encode_choice(std::uint64_t index, std::uint64_t k) {
    int w = choice_width(k);
    if (index >= k) throw UsageError("choice index out of range");
    Bits out;
    for (int b = w - 1; b >= 0; --b) out.push_back(((index >> b) & 1) != 0);
    return out;
}

std::uint64_t decode_choice(const Bits& bits, std::size_t& pos, std::uint64_t k) {
    int w = choice_width(k);
    if (pos + w > bits.size()) throw ProtocolFailure("truncated choice code");
    std::uint64_t idx = 0;
    for (int b = 0; b < w; ++b) idx = (idx << 1) | (bits[pos++] ? 1u : 0u);
    if (idx >= k) throw ProtocolFailure("choice code out of range");
    return idx;
}

double choice_cost(std::uint64_t k) {
    if (k == 0) throw UsageError("choice among zero alternatives");
    return std::log2(static_cast<double>(k));
}

Wide binomial(int r, int s) {
    if (s < 0 || s > r) return 0;
    s = std::min(s, r - s);
    Wide c = 1;
    const Wide limit = ~Wide{0};
    for (int i = 0; i < s; ++i) {
        if (c > limit / static_cast<Wide>(r - i)) throw CapacityError("binomial coefficient overflows 128 bits");
        c = c * static_cast<Wide>(r - i) / static_cast<Wide>(i + 1);
    }
    return c;
}

int subset_width(int r, int s) {
    Wide c = binomial(r, s);
    if (c == 0) throw UsageError("subset size exceeds universe");
    Wide x = c - 1;
    int w = 0;
    while (x) {
        ++w;
        x >>= 1;
    }
    return w;
}

double subset_cost(int r, int s) {
    return (std::lgamma(r + 1.0) - std::lgamma(s + 1.0) - std::lgamma(r - s + 1.0)) / std::log(2.0);
}

Wide subset_rank(const std::vector<int>& chosen, int r) {
    std::vector<int> c = chosen;
    std::sort(c.begin(), c.end());
    Wide rank = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] < 0 || c[i] >= r || (i && c[i] == c[i - 1])) throw UsageError("subset element out of range or repeated");
        rank += binomial(c[i], static_cast<int>(i) + 1);
    }
    return rank;
}

std::vector<int> subset_unrank(Wide rank, int r, int s) {
    std::vector<int> out(s);
    int hi = r - 1;
    for (int i = s; i >= 1; --i) {
        int c = hi;
        while (c >= 0 && binomial(c, i) > rank) --c;
        if (c < i - 1) throw ProtocolFailure("subset rank out of range");
        out[i - 1] = c;
        rank -= binomial(c, i);
        hi = c - 1;
    }
    return out;
}

Bits encode_subset_rank(const std::vector<int>& chosen, int r, int s) {
    if (static_cast<int>(chosen.size()) != s) throw UsageError("subset size differs from s");
    int w = subset_width(r, s);
    Wide rank = subset_rank(chosen, r);
    Bits out;
    for (int b = w - 1; b >= 0; --b) out.push_back(((rank >> b) & 1) != 0);
    return out;
}

std::vector<int> decode_subset_rank(const Bits& bits, std::size_t& pos, int r, int s) {
    int w = subset_width(r, s);
    if (pos + w > bits.size()) throw ProtocolFailure("truncated subset code");
    Wide rank = 0;
    for (int b = 0; b < w; ++b) rank = (rank << 1) | (bits[pos++] ? 1u : 0u);
    if (rank >= binomial(r, s)) throw ProtocolFailure("subset rank out of range");
    return subset_unrank(rank, r, s);
}

void Transcript::record_reply(int agent, Bits payload, std::string label, double idealized) {
    if (label.find_first_of(",\n") != std::string::npos) throw UsageError("transcript labels may not contain ',' or newline");
    integer_bits_ += payload.size();
    idealized_bits_ += idealized;
    entries_.push_back(Entry{agent, std::move(label), std::move(payload), idealized});
}

std::uint64_t Transcript::bits_of(int agent) const {
    std::uint64_t total = 0;
    for (const auto& e : entries_)
        if (e.agent == agent) total += e.payload.size();
    return total;
}

std::string Transcript::dump() const {
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (const auto& e : entries_) {
        out += std::to_string(e.agent) + ',' + e.label + ',' + std::to_string(e.payload.size()) + ',';
        for (std::size_t i = 0; i < e.payload.size(); i += 8) {
            unsigned byte = 0;
            for (std::size_t j = 0; j < 8; ++j) byte = (byte << 1) | ((i + j < e.payload.size() && e.payload[i + j]) ? 1u : 0u);
            out += hex[byte >> 4];
            out += hex[byte & 15];
        }
        out += '\n';
    }
    return out;
}

Transcript Transcript::parse(const std::string& text) {
    Transcript t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 4) throw ParseError(ParseErrorKind::Malformed, "transcript line needs 4 fields");
        int agent = 0;
        std::size_t nbits = 0;
        try {
            agent = std::stoi(f[0]);
            nbits = std::stoul(f[2]);
        } catch (const std::logic_error&) {
            throw ParseError(ParseErrorKind::Malformed, "transcript line has a non-numeric field");
        }
        if (agent < 0) throw ParseError(ParseErrorKind::Malformed, "negative agent in transcript");
        if (f[3].size() != 2 * ((nbits + 7) / 8)) throw ParseError(ParseErrorKind::ShapeMismatch, "payload length mismatch");
        Bits payload;
        for (std::size_t i = 0; i < nbits; ++i) {
            const std::string hex = f[3].substr(2 * (i / 8), 2);
            if (!std::isxdigit(static_cast<unsigned char>(hex[0])) || !std::isxdigit(static_cast<unsigned char>(hex[1])))
                throw ParseError(ParseErrorKind::Malformed, "payload is not hex");
            unsigned byte = std::stoul(hex, nullptr, 16);
            payload.push_back(((byte >> (7 - i % 8)) & 1) != 0);
        }
        // Idealized costs are not part of the dump; replay recomputes them.
        t.record_reply(agent, std::move(payload), f[1]);
    }
    return t;
}

Bits Channel::exchange(int agent, std::string_view label, const std::function<Bits(const Valuation&)>& reply) {
    if (tape_) {
        if (cursor_ >= tape_->entries().size()) throw ProtocolFailure("replay ran past the end of the transcript");
        const Entry& e = tape_->entries()[cursor_++];
        if (e.agent != agent || e.label != label)
            throw ProtocolFailure("replay diverged at entry " + std::to_string(cursor_ - 1) + ": expected " +
                                  std::to_string(agent) + "/" + std::string(label) + ", found " +
                                  std::to_string(e.agent) + "/" + e.label);
        return e.payload;
    }
    return reply(inst_->v(agent));
}

void Channel::commit(int agent, std::string_view label, const Bits& payload, double idealized) {
    log_.record_reply(agent, payload, std::string(label), idealized);
}

void Channel::expect_consumed(const Bits& out, std::size_t pos) const {
    if (pos != out.size()) throw ProtocolFailure("reply carries trailing bits");
}

}  // namespace fairalloc
