#include <algorithm>
#include <limits>

#include "internal.hpp"

namespace fairalloc::detail {
namespace {

constexpr long long kSolverCap = 50'000'000;  // DP cells times transitions

}  // namespace

Outcome two_valued(const Public& pub, Channel& ch, const Crs&) {
    require_kind(pub, pub.kind == Kind::TwoValued, "two-valued", "two-valued");
    require(pub.n >= 1, "two-valued needs n >= 1");
    const int n = pub.n, m = pub.m;
    const Value a = pub.a, b = pub.b;
    auto high = [&](const Valuation& v, int e) { return v.values[e] == a; };

    std::vector<int> count(n);
    for (int i = 0; i < n; ++i)
        count[i] = static_cast<int>(ch.choice(i, "count", static_cast<std::uint64_t>(m) + 1, [&](const Valuation& v) {
            return static_cast<std::uint64_t>(std::count(v.values.begin(), v.values.end(), a));
        }));
    std::vector<Value> share(n);
    for (int i = 0; i < n; ++i) share[i] = mms_two_valued_counts(count[i], m - count[i], a, b, n);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return count[x] < count[y]; });

    const int cap = m / n;
    if (static_cast<long long>(n) * (m + 1) * (cap + 1) > kSolverCap)
        throw CapacityError("two-valued: ordered-instance solver cap exceeded");
    // Fillers needed by an agent who takes `take` high items, or -1 when no filler count suffices.
    auto fillers = [&](int i, int take) -> long long {
        Value gap = share[i] - a * take;
        if (gap <= 0) return 0;
        if (b == 0) return -1;
        return (gap + b - 1) / b;
    };
    // best[t][s]: fewest items handed to the first t agents in order when they take s high items.
    constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<std::vector<long long>> best(n + 1, std::vector<long long>(m + 1, kInf));
    std::vector<std::vector<int>> choice(n + 1, std::vector<int>(m + 1, -1));
    best[0][0] = 0;
    for (int t = 0; t < n; ++t) {
        const int i = order[t];
        for (int s = 0; s <= m; ++s) {
            if (best[t][s] >= kInf) continue;
            for (int take = 0; take <= std::min(cap, count[i]) && s + take <= count[i]; ++take) {
                long long f = fillers(i, take);
                if (f < 0) continue;
                long long total = best[t][s] + take + f;
                if (total < best[t + 1][s + take]) {
                    best[t + 1][s + take] = total;
                    choice[t + 1][s + take] = take;
                }
            }
        }
    }
    int end = static_cast<int>(std::min_element(best[n].begin(), best[n].end()) - best[n].begin());
    if (best[n][end] > m) throw ProtocolFailure("two-valued: ordered instance has no MMS allocation");
    std::vector<int> take(n), extra(n);
    for (int t = n, s = end; t > 0; --t) {
        const int i = order[t - 1];
        take[i] = choice[t][s];
        extra[i] = static_cast<int>(fillers(i, take[i]));
        s -= take[i];
    }

    std::vector<int> remaining = all_items(m);
    std::vector<std::vector<int>> held(n);
    for (int i : order) {
        if (take[i] == 0) continue;
        auto picked = ch.subset(i, "pick", static_cast<int>(remaining.size()), take[i], [&](const Valuation& v) {
            std::vector<int> chosen;
            for (int p = 0; p < static_cast<int>(remaining.size()) && static_cast<int>(chosen.size()) < take[i]; ++p)
                if (high(v, remaining[p])) chosen.push_back(p);
            if (static_cast<int>(chosen.size()) < take[i]) throw ProtocolFailure("two-valued: too few high items remain");
            return chosen;
        });
        std::vector<char> gone(remaining.size(), 0);
        for (int p : picked) gone[p] = 1, held[i].push_back(remaining[p]);
        std::vector<int> rest;
        for (std::size_t p = 0; p < remaining.size(); ++p)
            if (!gone[p]) rest.push_back(remaining[p]);
        remaining.swap(rest);
    }
    for (int i : order) {
        held[i].insert(held[i].end(), remaining.begin(), remaining.begin() + extra[i]);
        remaining.erase(remaining.begin(), remaining.begin() + extra[i]);
    }
    held[order.back()].insert(held[order.back()].end(), remaining.begin(), remaining.end());
    Outcome out;
    out.diag.targets = take;
    out.allocation = Allocation::from_bundles(n, m, held);
    return out;
}

}  // namespace fairalloc::detail
