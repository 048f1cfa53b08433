#include <algorithm>
#include <optional>

#include "internal.hpp"

namespace fairalloc {

std::vector<int> prop1_cuts(const Valuation& v, int n) {
    if (!v.additive()) throw UsageError("prop1_cuts needs an additive valuation");
    if (n < 1) throw UsageError("prop1_cuts needs n >= 1");
    const __int128 total = v.total();
    std::vector<int> cuts;
    __int128 prefix = 0;
    int e = 0;
    for (int j = 1; j < n; ++j) {
        // The crossing item is the first whose inclusive prefix reaches j/n of the total.
        while (e < v.m() && static_cast<__int128>(n) * (prefix + v.values[e]) < j * total) prefix += v.values[e++];
        cuts.push_back(std::min(e + 1, v.m()));
    }
    return cuts;
}

long long default_bundle_count(int n) {
    long long c = 2;
    for (int k = 0; k < 9; ++k) {
        if (c > (1LL << 40)) return 1LL << 40;
        c *= n;
    }
    return c;
}

namespace detail {
namespace {

bool additive_kind(const Public& pub) { return pub.kind != Kind::UnitDemand; }

Outcome single_agent(const Public& pub) {
    Outcome out;
    out.allocation = Allocation(1, pub.m, 0);
    out.semi = SemiContiguous{{0}, {pub.m}, {-1}};
    return out;
}

Allocation from_units(int n, int m, const std::vector<std::vector<int>>& units, const TpsRun& run) {
    std::vector<std::vector<int>> held(n);
    for (int i = 0; i < n; ++i) {
        if (run.grabbed[i] >= 0) held[i] = units[run.grabbed[i]];
        const Leaf& leaf = run.leaves[i];
        if (leaf.bundle < 0) continue;
        for (int p = leaf.lo; p < leaf.hi; ++p)
            held[i].insert(held[i].end(), units[run.remaining[p]].begin(), units[run.remaining[p]].end());
    }
    return Allocation::from_bundles(n, m, held);
}

}  // namespace

Outcome prop1(const Public& pub, Channel& ch, const Crs& crs, bool randomized) {
    require_kind(pub, additive_kind(pub), "prop1", "additive");
    require(pub.n >= 1, "prop1 needs n >= 1");
    const int n = pub.n, m = pub.m;
    std::vector<std::optional<std::vector<int>>> cache(n);
    CutFn cut = [&](int agent, const Valuation& v, int index) {
        if (!cache[agent]) cache[agent] = prop1_cuts(v, n);
        return (*cache[agent])[index - 1];
    };
    auto leaves = median_decompose(ch, crs, n, all_items(n), m, 1, cut, randomized, "prop1");
    Outcome out;
    out.allocation = Allocation(n, m, 0);
    for (int i = 0; i < n; ++i)
        for (int e = leaves[i].lo; e < leaves[i].hi; ++e) out.allocation.owner[e] = i;
    return out;
}

TpsRun tps_engine(Channel& ch, const Crs& crs, int n, int units, const UnitValues& unit_values, bool randomized,
                  const std::string& tag) {
    struct AgentView {
        Scaled scaled;
        std::vector<Value> unit;
        std::optional<std::vector<int>> cuts;
    };
    std::vector<std::optional<AgentView>> view(n);
    auto agent = [&](int i, const Valuation& v) -> AgentView& {
        if (!view[i]) {
            AgentView a;
            a.scaled = scaled_view(v, n);
            a.unit = unit_values(i, v, a.scaled);
            view[i] = std::move(a);
        }
        return *view[i];
    };

    TpsRun run;
    run.grabbed.assign(n, -1);
    run.remaining = all_items(units);
    auto& remaining = run.remaining;
    for (int i = 0; i < n; ++i) {
        auto best = [&](const Valuation& v) -> std::optional<std::size_t> {
            const AgentView& a = agent(i, v);
            if (a.scaled.zero()) return std::nullopt;  // any bundle meets a zero threshold
            std::optional<std::size_t> pick;
            for (std::size_t p = 0; p < remaining.size(); ++p)
                if (a.scaled.at_least_rho(a.unit[remaining[p]]) && (!pick || a.unit[remaining[p]] > a.unit[remaining[*pick]]))
                    pick = p;
            return pick;
        };
        if (!ch.bit(i, tag + "-grab-ok", [&](const Valuation& v) { return best(v).has_value(); })) continue;
        auto p = ch.choice(i, tag + "-grab", remaining.size(), [&](const Valuation& v) { return *best(v); });
        run.grabbed[i] = remaining[p];
        remaining.erase(remaining.begin() + static_cast<long>(p));
    }

    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (run.grabbed[i] < 0) rest.push_back(i);
    const int parts = static_cast<int>(rest.size());
    const int length = static_cast<int>(remaining.size());
    CutFn cut = [&](int i, const Valuation& v, int index) {
        AgentView& a = agent(i, v);
        if (!a.cuts) {
            // Greedy bundles, each closing once it reaches the threshold; the last takes the rest.
            std::vector<int> cuts;
            int p = 0;
            for (int j = 1; j < parts; ++j) {
                __int128 sum = 0;
                int start = p;
                while (p < length && (p == start || !a.scaled.at_least_rho(sum))) sum += a.unit[remaining[p++]];
                if (!a.scaled.zero() && !a.scaled.at_least_rho(sum))
                    throw ProtocolFailure("tps phase 2: agent " + std::to_string(i) + " cannot form threshold bundles");
                cuts.push_back(p);
            }
            __int128 last = 0;
            for (int q = p; q < length; ++q) last += a.unit[remaining[q]];
            if (!a.scaled.zero() && !a.scaled.at_least_rho(last))
                throw ProtocolFailure("tps phase 2: agent " + std::to_string(i) + " has a short last bundle");
            a.cuts = cuts;
        }
        return (*a.cuts)[index - 1];
    };
    run.leaves = median_decompose(ch, crs, n, rest, length, 0, cut, randomized, tag);
    return run;
}

Outcome tps2p(const Public& pub, Channel& ch, const Crs& crs) {
    require_kind(pub, additive_kind(pub), "tps2p", "additive");
    require(pub.n >= 1, "tps2p needs n >= 1");
    if (pub.n == 1) return single_agent(pub);
    const int n = pub.n, m = pub.m;
    auto run = tps_engine(
        ch, crs, n, m, [](int, const Valuation&, Scaled& s) { return s.w; }, false, "tps");
    Outcome out;
    out.semi = build_semi(n, m, run.remaining, run.leaves, run.grabbed);
    out.allocation = out.semi->flatten(m);
    out.diag.non_holes = run.remaining;
    return out;
}

Outcome aprop(const Public& pub, Channel& ch, const Crs& crs, bool randomized) {
    require_kind(pub, additive_kind(pub), "aprop", "additive");
    require(pub.n >= 1, "aprop needs n >= 1");
    if (pub.n == 1) return single_agent(pub);
    const int n = pub.n, m = pub.m;
    struct AgentView {
        Scaled s;
        Value top = 0, second = 0;  // two largest truncated values over all items
        std::optional<std::vector<int>> cuts;
    };
    std::vector<std::optional<AgentView>> view(n);
    auto agent = [&](int i, const Valuation& v) -> AgentView& {
        if (!view[i]) {
            AgentView a;
            a.s = scaled_view(v, n);
            for (Value x : a.s.w) {
                if (x > a.top)
                    a.second = a.top, a.top = x;
                else if (x > a.second)
                    a.second = x;
            }
            view[i] = std::move(a);
        }
        return *view[i];
    };
    auto good = [&](const AgentView& a, int e) {
        Value partner = a.s.w[e] == a.top ? a.second : a.top;
        return a.s.at_least_rho(a.s.w[e]) && a.s.above_one(static_cast<__int128>(a.s.w[e]) + partner);
    };
    auto pick_among = [](const std::vector<int>& items, auto&& pred) -> std::optional<std::size_t> {
        for (std::size_t p = 0; p < items.size(); ++p)
            if (pred(items[p])) return p;
        return std::nullopt;
    };

    std::vector<int> hole(n, -1), open = all_items(m);
    for (int i = 0; i < n; ++i) {
        auto find = [&](const Valuation& v) {
            AgentView& a = agent(i, v);
            return pick_among(open, [&](int e) { return good(a, e); });
        };
        if (!ch.bit(i, "good-ok", [&](const Valuation& v) { return find(v).has_value(); })) continue;
        auto p = ch.choice(i, "good", open.size(), [&](const Valuation& v) { return *find(v); });
        hole[i] = open[p];
        open.erase(open.begin() + static_cast<long>(p));
    }
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (hole[i] < 0) rest.push_back(i);

    std::vector<int> pool;
    for (int i : rest) {
        std::vector<int> cand;
        for (int e : open)
            if (std::find(pool.begin(), pool.end(), e) == pool.end()) cand.push_back(e);
        auto find = [&](const Valuation& v) {
            AgentView& a = agent(i, v);
            if (a.s.zero()) return std::optional<std::size_t>{};
            return pick_among(cand, [&](int e) { return a.s.at_least_rho(a.s.w[e]); });
        };
        if (!ch.bit(i, "large-ok", [&](const Valuation& v) { return find(v).has_value(); })) continue;
        pool.push_back(cand[ch.choice(i, "large", cand.size(), [&](const Valuation& v) { return *find(v); })]);
    }
    std::sort(pool.begin(), pool.end());
    std::vector<int> body;
    for (int e : open)
        if (!std::binary_search(pool.begin(), pool.end(), e)) body.push_back(e);

    const int parts = static_cast<int>(rest.size());
    const int length = static_cast<int>(body.size());
    CutFn cut = [&](int i, const Valuation& v, int index) {
        AgentView& a = agent(i, v);
        if (!a.cuts) {
            std::vector<int> cuts;
            int p = 0;
            for (int j = 1; j < parts; ++j) {
                if (a.s.zero()) {
                    cuts.push_back(0);
                    continue;
                }
                std::vector<char> inside(m, 0);
                __int128 sum = 0;
                if (j <= static_cast<int>(pool.size())) inside[pool[j - 1]] = 1, sum += a.s.w[pool[j - 1]];
                auto is_aprop = [&] {
                    if (!a.s.at_least_rho(sum)) return false;
                    Value outside = 0;
                    for (int e = 0; e < m; ++e)
                        if (!inside[e]) outside = std::max(outside, a.s.w[e]);
                    return a.s.above_one(sum + outside);
                };
                while (!is_aprop()) {
                    if (p == length) throw ProtocolFailure("aprop: agent " + std::to_string(i) + " ran out of items for bundle " + std::to_string(j));
                    inside[body[p]] = 1;
                    sum += a.s.w[body[p++]];
                }
                cuts.push_back(p);
            }
            a.cuts = cuts;
        }
        return (*a.cuts)[index - 1];
    };
    auto leaves = median_decompose(ch, crs, n, rest, length, 0, cut, randomized, "aprop");
    for (int i : rest)
        if (leaves[i].bundle < static_cast<int>(pool.size())) hole[i] = pool[leaves[i].bundle];

    Outcome out;
    out.semi = build_semi(n, m, body, leaves, hole);
    out.allocation = out.semi->flatten(m);
    out.diag.holes = pool;
    out.diag.non_holes = body;
    return out;
}

Outcome tps_bundle(const Public& pub, Channel& ch, const Crs& crs, const RunOptions& opts) {
    require_kind(pub, additive_kind(pub), "tps-bundle", "additive");
    require(pub.n >= 1, "tps-bundle needs n >= 1");
    if (pub.n == 1) return single_agent(pub);
    const int n = pub.n, m = pub.m;
    const long long count = opts.bundle_count > 0 ? opts.bundle_count : default_bundle_count(n);
    if (m <= count) return tps2p(pub, ch, crs);

    const int k = static_cast<int>(count);
    std::vector<int> unit_of(m);
    Outcome out;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= opts.max_attempts) throw ProtocolFailure("tps-bundle: bundling never became unanimous");
        Stream rng = crs.stream("tps-bundle", static_cast<std::uint64_t>(attempt));
        for (int e = 0; e < m; ++e) unit_of[e] = static_cast<int>(rng.below(k));
        bool unanimous = true;
        for (int i = 0; i < n; ++i)
            unanimous &= ch.bit(i, "vote", [&](const Valuation& v) {
                Scaled s = scaled_view(v, n);
                std::vector<__int128> sum(k, 0);
                for (int e = 0; e < m; ++e) sum[unit_of[e]] += s.w[e];
                return std::all_of(sum.begin(), sum.end(), [&](__int128 x) { return s.at_most(x, 2 * n, 2 * n - 1); });
            });
        if (unanimous) break;
        ++out.diag.retries;
    }
    std::vector<std::vector<int>> units(k);
    for (int e = 0; e < m; ++e) units[unit_of[e]].push_back(e);
    auto run = tps_engine(
        ch, crs, n, k,
        [&](int, const Valuation&, Scaled& s) {
            std::vector<Value> value(k, 0);
            for (int e = 0; e < m; ++e) value[unit_of[e]] += s.w[e];
            return value;
        },
        true, "tps-bundled");
    out.allocation = from_units(n, m, units, run);
    out.diag.bundles = k;
    return out;
}

}  // namespace detail
}  // namespace fairalloc
