#include <sstream>

#include "fairalloc/model.hpp"

namespace fairalloc {
namespace {

constexpr int kInstanceVersion = 1;
constexpr int kAllocationVersion = 1;

[[noreturn]] void malformed(const std::string& what) { throw ParseError(ParseErrorKind::Malformed, what); }

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

std::int64_t parse_int(const std::string& tok) {
    std::size_t used = 0;
    std::int64_t x = 0;
    try {
        x = std::stoll(tok, &used);
    } catch (const std::exception&) {
        malformed("expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) malformed("expected an integer, got '" + tok + "'");
    return x;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

// Reads "key value" from lines[pos] and advances.
std::string field(const std::vector<std::string>& lines, std::size_t& pos, const std::string& key) {
    if (pos >= lines.size()) malformed("truncated: missing field '" + key + "'");
    auto t = tokens(lines[pos]);
    if (t.size() != 2 || t[0] != key) malformed("expected field '" + key + "' at line " + std::to_string(pos + 1));
    ++pos;
    return t[1];
}

void check_header(const std::vector<std::string>& lines, const std::string& magic, int version) {
    if (lines.empty()) malformed("empty document");
    auto t = tokens(lines[0]);
    if (t.size() != 2 || t[0] != magic) malformed("missing '" + magic + "' header");
    if (parse_int(t[1]) != version)
        throw ParseError(ParseErrorKind::VersionMismatch,
                         "unsupported version " + t[1] + " (expected " + std::to_string(version) + ")");
}

}  // namespace

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "fairalloc-instance " << kInstanceVersion << '\n';
    out << "n " << inst.n << '\n' << "m " << inst.m << '\n';
    out << "kind " << to_string(inst.kind) << '\n' << "scale " << inst.scale << '\n';
    if (inst.kind == Kind::TwoValued) out << "a " << inst.a << '\n' << "b " << inst.b << '\n';
    out << "values\n";
    for (const auto& v : inst.agents) {
        for (int e = 0; e < v.m(); ++e) out << (e ? " " : "") << v.values[e];
        out << '\n';
    }
    return out.str();
}

Instance parse_instance(const std::string& text) {
    auto lines = split_lines(text);
    check_header(lines, "fairalloc-instance", kInstanceVersion);
    std::size_t pos = 1;
    Instance inst;
    inst.n = static_cast<int>(parse_int(field(lines, pos, "n")));
    inst.m = static_cast<int>(parse_int(field(lines, pos, "m")));
    try {
        inst.kind = kind_from_string(field(lines, pos, "kind"));
    } catch (const UsageError& e) {
        malformed(e.what());
    }
    inst.scale = parse_int(field(lines, pos, "scale"));
    if (inst.scale <= 0) malformed("scale must be positive");
    if (inst.kind == Kind::TwoValued) {
        inst.a = parse_int(field(lines, pos, "a"));
        inst.b = parse_int(field(lines, pos, "b"));
    }
    if (inst.n < 1 || inst.m < 1) throw ParseError(ParseErrorKind::ShapeMismatch, "n and m must be positive");
    if (pos >= lines.size() || tokens(lines[pos]) != std::vector<std::string>{"values"})
        malformed("truncated: missing values block");
    ++pos;
    std::size_t rows = lines.size() - pos;
    if (rows != static_cast<std::size_t>(inst.n))
        throw ParseError(ParseErrorKind::ShapeMismatch,
                         "expected " + std::to_string(inst.n) + " value rows, found " + std::to_string(rows));
    for (int i = 0; i < inst.n; ++i, ++pos) {
        auto t = tokens(lines[pos]);
        if (t.size() != static_cast<std::size_t>(inst.m))
            throw ParseError(ParseErrorKind::ShapeMismatch, "row " + std::to_string(i) + " has " +
                                                                std::to_string(t.size()) + " values, expected m=" +
                                                                std::to_string(inst.m));
        Valuation v{inst.kind, {}, inst.scale, inst.a, inst.b};
        for (const auto& tok : t) v.values.push_back(parse_int(tok));
        inst.agents.push_back(std::move(v));
    }
    try {
        inst.validate();
    } catch (const UsageError& e) {
        malformed(e.what());
    }
    return inst;
}

std::string serialize_allocation(const Allocation& a) {
    std::ostringstream out;
    out << "fairalloc-allocation " << kAllocationVersion << '\n';
    out << "n " << a.n << '\n' << "m " << a.m() << '\n' << "owners";
    for (int o : a.owner) out << ' ' << o;
    out << '\n';
    return out.str();
}

Allocation parse_allocation(const std::string& text) {
    auto lines = split_lines(text);
    check_header(lines, "fairalloc-allocation", kAllocationVersion);
    std::size_t pos = 1;
    int n = static_cast<int>(parse_int(field(lines, pos, "n")));
    int m = static_cast<int>(parse_int(field(lines, pos, "m")));
    if (pos >= lines.size()) malformed("truncated: missing owners line");
    auto t = tokens(lines[pos]);
    if (t.empty() || t[0] != "owners") malformed("expected owners line");
    if (t.size() != static_cast<std::size_t>(m) + 1)
        throw ParseError(ParseErrorKind::ShapeMismatch, "owners line length differs from m");
    Allocation a(n, m);
    for (int e = 0; e < m; ++e) {
        a.owner[e] = static_cast<int>(parse_int(t[e + 1]));
        if (a.owner[e] < 0 || a.owner[e] >= n)
            throw ParseError(ParseErrorKind::ShapeMismatch, "owner index out of range");
    }
    return a;
}

}  // namespace fairalloc
