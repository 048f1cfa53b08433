#include <algorithm>
#include <numeric>
#include <set>

#include "internal.hpp"

namespace fairalloc {

Public public_of(const Instance& inst) { return Public{inst.n, inst.m, inst.kind, inst.scale, inst.a, inst.b}; }

void SemiContiguous::validate(int m) const {
    const int agents = n();
    if (static_cast<int>(block_begin.size()) != agents || static_cast<int>(block_end.size()) != agents)
        throw ProtocolFailure("semi-contiguous: block arrays do not match the agent count");
    std::vector<int> order(agents);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return std::tie(block_begin[x], block_end[x]) < std::tie(block_begin[y], block_end[y]);
    });
    int at = 0;
    for (int i : order) {
        if (block_begin[i] > block_end[i]) throw ProtocolFailure("semi-contiguous: block of agent " + std::to_string(i) + " is reversed");
        if (block_begin[i] != at) throw ProtocolFailure("semi-contiguous: blocks are not consecutive at item " + std::to_string(at));
        at = block_end[i];
    }
    if (at != m) throw ProtocolFailure("semi-contiguous: blocks do not cover all items");
    std::set<int> seen;
    for (int h : hole) {
        if (h < 0) continue;
        if (h >= m) throw ProtocolFailure("semi-contiguous: hole out of range");
        if (!seen.insert(h).second) throw ProtocolFailure("semi-contiguous: hole assigned twice");
    }
    if (static_cast<int>(seen.size()) > agents) throw ProtocolFailure("semi-contiguous: more holes than agents");
}

Allocation SemiContiguous::flatten(int m) const {
    validate(m);
    Allocation a(n(), m, -1);
    for (int i = 0; i < n(); ++i)
        for (int e = block_begin[i]; e < block_end[i]; ++e) a.owner[e] = i;
    for (int i = 0; i < n(); ++i)
        if (hole[i] >= 0) a.owner[hole[i]] = i;
    return a;
}

namespace detail {

void require(bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
}

void require_n(const Public& pub, int lo, int hi, const char* id) {
    if (pub.n < lo || pub.n > hi)
        throw UsageError(std::string(id) + " needs " + std::to_string(lo) + " <= n <= " + std::to_string(hi));
}

void require_kind(const Public& pub, bool ok, const char* id, const char* need) {
    if (!ok) throw UsageError(std::string(id) + " needs " + need + " valuations, got " + to_string(pub.kind));
}

int ceil_log2(std::uint64_t x) {
    int w = 0;
    while (w < 64 && (std::uint64_t{1} << w) < x) ++w;
    return w;
}

std::vector<int> all_items(int m) {
    std::vector<int> xs(m);
    std::iota(xs.begin(), xs.end(), 0);
    return xs;
}

std::vector<char> distinguished(const Valuation& v, int n) {
    std::vector<char> mark(v.m(), 0);
    for (int e : top_items(v, std::min(n, v.m()))) mark[e] = 1;
    return mark;
}

Scaled scaled_view(const Valuation& v, int n) {
    Scaled s;
    s.n = n;
    Valuation t = truncate_over_proportional(v, n);
    s.w = t.values;
    Rational cap = tps(v, n) * t.scale;
    s.t_num = cap.numerator();
    s.t_den = cap.denominator();
    return s;
}

}  // namespace detail
}  // namespace fairalloc
