#include "internal.hpp"

namespace fairalloc::detail {

Outcome cut_choose(const Public& pub, Channel& ch, const Crs&) {
    require_kind(pub, pub.kind != Kind::UnitDemand, "cut-choose", "additive");
    require_n(pub, 2, 2, "cut-choose");
    const int m = pub.m;
    Bits cut = ch.raw(0, "partition", static_cast<std::size_t>(m), [&](const Valuation& v) {
        Bits side(m, false);
        const MmsResult best = mms_exact(v, 2);
        for (int e : best.partition[1]) side[e] = true;
        return side;
    });
    std::vector<int> part[2];
    for (int e = 0; e < m; ++e) part[cut[e] ? 1 : 0].push_back(e);
    bool take_one = ch.bit(1, "choose", [&](const Valuation& v) { return raw_value(v, part[1]) > raw_value(v, part[0]); });
    Outcome out;
    out.allocation = Allocation(2, m, 0);
    for (int e : part[take_one ? 1 : 0]) out.allocation.owner[e] = 1;
    return out;
}

Outcome round_robin(const Public& pub, Channel& ch, const Crs&) {
    require(pub.n >= 1, "round-robin needs n >= 1");
    std::vector<int> remaining = all_items(pub.m);
    Outcome out;
    out.allocation = Allocation(pub.n, pub.m, 0);
    for (int turn = 0; !remaining.empty(); turn = (turn + 1) % pub.n) {
        auto p = ch.choice(turn, "pick", remaining.size(), [&](const Valuation& v) {
            std::size_t best = 0;
            for (std::size_t q = 1; q < remaining.size(); ++q)
                if (v.values[remaining[q]] > v.values[remaining[best]]) best = q;
            return best;
        });
        out.allocation.owner[remaining[p]] = turn;
        remaining.erase(remaining.begin() + static_cast<long>(p));
    }
    return out;
}

}  // namespace fairalloc::detail
