#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/model.hpp"

namespace fairalloc {

using Bits = std::vector<bool>;

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index);

// Portable draws on top of mt19937_64; never depends on library distributions.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    std::uint64_t below(std::uint64_t k);
    std::int64_t between(std::int64_t lo, std::int64_t hi);  // inclusive
    bool coin() { return (eng_() >> 63) != 0; }
    // True with probability num/den.
    bool bernoulli(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
    std::vector<int> permutation(int n);
    template <class T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

// Common random string: every named stream is a pure function of (seed, label).
class Crs {
public:
    explicit Crs(std::uint64_t seed = 0) : seed_(seed) {}
    std::uint64_t seed() const { return seed_; }
    Stream stream(std::string_view label) const { return Stream(derive_seed(seed_, label)); }
    Stream stream(std::string_view label, std::uint64_t index) const {
        return Stream(derive_seed(seed_, label, index));
    }

private:
    std::uint64_t seed_;
};

// Encodings. Every encoder has a decoder reading from a cursor.
Bits encode_uint(std::uint64_t k);
std::uint64_t decode_uint(const Bits& bits, std::size_t& pos);
Bits encode_unary(std::uint64_t len);
std::uint64_t decode_unary(const Bits& bits, std::size_t& pos);

int choice_width(std::uint64_t k);
Bits encode_choice(std::uint64_t index, std::uint64_t k);
std::uint64_t decode_choice(const Bits& bits, std::size_t& pos, std::uint64_t k);
double choice_cost(std::uint64_t k);  // log2 k

using Wide = unsigned __int128;
Wide binomial(int r, int s);
int subset_width(int r, int s);
double subset_cost(int r, int s);  // log2 C(r, s)
Wide subset_rank(const std::vector<int>& chosen, int r);
std::vector<int> subset_unrank(Wide rank, int r, int s);
Bits encode_subset_rank(const std::vector<int>& chosen, int r, int s);
std::vector<int> decode_subset_rank(const Bits& bits, std::size_t& pos, int r, int s);

struct Entry {
    int agent = 0;
    std::string label;
    Bits payload;
    double idealized = 0;
};

// Append-only log of agent replies. Referee computations never appear here.
class Transcript {
public:
    void record_reply(int agent, Bits payload, std::string label, double idealized);
    void record_reply(int agent, Bits payload, std::string label) {
        double cost = static_cast<double>(payload.size());
        record_reply(agent, std::move(payload), std::move(label), cost);
    }
    const std::vector<Entry>& entries() const { return entries_; }
    std::uint64_t integer_bits() const { return integer_bits_; }
    double idealized_bits() const { return idealized_bits_; }
    std::uint64_t bits_of(int agent) const;

    // One line per entry: agent,label,bits,payload-hex (bits packed MSB first).
    std::string dump() const;
    static Transcript parse(const std::string& text);

private:
    std::vector<Entry> entries_;
    std::uint64_t integer_bits_ = 0;
    double idealized_bits_ = 0;
};

// The referee's only window onto private valuations. In live mode every reply is
// computed by the agent callback from her own valuation; in replay mode it is read
// back from a recorded transcript and the callback never runs. Both modes decode
// the same payload, so the referee learns exactly what the bits say.
class Channel {
public:
    static Channel live(const Instance& inst) { return Channel(&inst, nullptr); }
    static Channel replay(const Transcript& tape) { return Channel(nullptr, &tape); }

    template <class F>
    bool bit(int agent, std::string_view label, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return Bits{static_cast<bool>(f(v))}; });
        commit(agent, label, out, 1.0);
        return out.at(0);
    }
    template <class F>
    std::uint64_t uint(int agent, std::string_view label, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return encode_uint(f(v)); });
        std::size_t pos = 0;
        std::uint64_t k = decode_uint(out, pos);
        expect_consumed(out, pos);
        commit(agent, label, out, static_cast<double>(out.size()));
        return k;
    }
    template <class F>
    std::uint64_t unary(int agent, std::string_view label, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return encode_unary(f(v)); });
        std::size_t pos = 0;
        std::uint64_t len = decode_unary(out, pos);
        expect_consumed(out, pos);
        commit(agent, label, out, static_cast<double>(out.size()));
        return len;
    }
    template <class F>
    std::uint64_t choice(int agent, std::string_view label, std::uint64_t k, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return encode_choice(f(v), k); });
        std::size_t pos = 0;
        std::uint64_t idx = decode_choice(out, pos, k);
        expect_consumed(out, pos);
        commit(agent, label, out, choice_cost(k));
        return idx;
    }
    template <class F>
    std::vector<int> subset(int agent, std::string_view label, int r, int s, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return encode_subset_rank(f(v), r, s); });
        std::size_t pos = 0;
        auto chosen = decode_subset_rank(out, pos, r, s);
        expect_consumed(out, pos);
        commit(agent, label, out, subset_cost(r, s));
        return chosen;
    }
    // Fixed-width raw payload, one bit per position.
    template <class F>
    Bits raw(int agent, std::string_view label, std::size_t width, F&& f) {
        Bits out = exchange(agent, label, [&](const Valuation& v) { return Bits(f(v)); });
        if (out.size() != width) throw ProtocolFailure("raw reply has wrong width");
        commit(agent, label, out, static_cast<double>(width));
        return out;
    }

    const Transcript& transcript() const { return log_; }
    Transcript take() { return std::move(log_); }
    bool replaying() const { return tape_ != nullptr; }
    // Replay only: every recorded entry has been read back.
    bool exhausted() const { return tape_ && cursor_ == tape_->entries().size(); }

private:
    Channel(const Instance* inst, const Transcript* tape) : inst_(inst), tape_(tape) {}
    Bits exchange(int agent, std::string_view label, const std::function<Bits(const Valuation&)>& reply);
    void commit(int agent, std::string_view label, const Bits& payload, double idealized);
    void expect_consumed(const Bits& out, std::size_t pos) const;

    const Instance* inst_;
    const Transcript* tape_;
    std::size_t cursor_ = 0;
    Transcript log_;
};

}  // namespace fairalloc
