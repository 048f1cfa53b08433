#include "fairalloc/shares.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace fairalloc {
namespace {

void require_additive(const Valuation& v, const char* op) {
    if (!v.additive()) throw UsageError(std::string(op) + " needs an additive valuation");
}

void require_agents(int n) {
    if (n < 1) throw UsageError("agent count must be at least 1");
}

// Exhaustive maximin for small instances. Items are assigned in decreasing value
// order; a new bundle is opened only as the next unused index.
class MaximinSearch {
public:
    MaximinSearch(const Valuation& v, int n) : v_(v), n_(n), ud_(v.kind == Kind::UnitDemand) {
        order_.resize(v.m());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) { return v.values[x] > v.values[y]; });
        suffix_sum_.assign(order_.size() + 1, 0);
        for (int k = static_cast<int>(order_.size()) - 1; k >= 0; --k)
            suffix_sum_[k] = suffix_sum_[k + 1] + v.values[order_[k]];
        if (ud_) {
            auto top = top_items(v, n);
            ceiling_ = static_cast<int>(top.size()) < n ? 0 : v.values[top_by_rank(n - 1)];
        } else {
            ceiling_ = suffix_sum_[0] / n;  // floor(V/n) bounds the min bundle
        }
    }

    MmsResult run() {
        bundle_.assign(n_, 0);
        assign_.assign(order_.size(), 0);
        best_ = -1;
        dfs(0, 0);
        MmsResult r{Rational(best_, v_.scale), std::vector<Bundle>(n_)};
        for (std::size_t k = 0; k < order_.size(); ++k) r.partition[best_assign_[k]].push_back(order_[k]);
        for (auto& b : r.partition) std::sort(b.begin(), b.end());
        return r;
    }

private:
    int top_by_rank(int rank) const { return order_[rank]; }

    Value combine(Value acc, Value x) const { return ud_ ? std::max(acc, x) : acc + x; }

    Value optimistic(std::size_t k) const {
        std::vector<Value> b = bundle_;
        std::sort(b.begin(), b.end());
        if (ud_) {
            Value rest = k < order_.size() ? v_.values[order_[k]] : 0;
            return std::max(b[0], rest);
        }
        // Water-filling the remaining value into the lowest bundles.
        Value rem = suffix_sum_[k];
        Value level = b[0];
        for (int j = 0; j < n_; ++j) {
            Value next = j + 1 < n_ ? b[j + 1] : std::numeric_limits<Value>::max();
            Value width = j + 1;
            if (next == std::numeric_limits<Value>::max() || (next - b[j]) * width > rem) {
                return b[j] + rem / width;
            }
            rem -= (next - b[j]) * width;
            level = next;
        }
        return level;
    }

    void dfs(std::size_t k, int used) {
        if (best_ >= ceiling_) return;
        if (k == order_.size()) {
            Value lo = *std::min_element(bundle_.begin(), bundle_.end());
            if (lo > best_) {
                best_ = lo;
                best_assign_ = assign_;
            }
            return;
        }
        if (optimistic(k) <= best_) return;
        Value x = v_.values[order_[k]];
        int limit = std::min(used + 1, n_);
        for (int j = 0; j < limit; ++j) {
            Value saved = bundle_[j];
            bundle_[j] = combine(saved, x);
            assign_[k] = j;
            dfs(k + 1, std::max(used, j + 1));
            bundle_[j] = saved;
            if (best_ >= ceiling_) return;
        }
    }

    const Valuation& v_;
    int n_;
    bool ud_;
    std::vector<int> order_;
    std::vector<Value> suffix_sum_;
    std::vector<Value> bundle_;
    std::vector<int> assign_, best_assign_;
    Value ceiling_ = 0;
    Value best_ = -1;
};

MmsResult two_agent_subset_sum(const Valuation& v) {
    const int m = v.m();
    const int h = m / 2;
    auto sums = [&](int lo, int hi) {
        int cnt = hi - lo;
        std::vector<std::pair<Value, std::uint32_t>> out(std::size_t{1} << cnt);
        for (std::uint32_t mask = 0; mask < out.size(); ++mask) {
            Value s = 0;
            for (int j = 0; j < cnt; ++j)
                if (mask >> j & 1) s += v.values[lo + j];
            out[mask] = {s, mask};
        }
        return out;
    };
    auto left = sums(0, h);
    auto right = sums(h, m);
    std::sort(right.begin(), right.end());
    const Value total = v.total();
    Value best = -1;
    std::uint32_t best_l = 0, best_r = 0;
    for (const auto& [sl, ml] : left) {
        // Largest right sum keeping the side at most half the total.
        auto it = std::upper_bound(right.begin(), right.end(), std::make_pair(total / 2 - sl, ~std::uint32_t{0}));
        if (it == right.begin()) continue;
        --it;
        Value s = sl + it->first;
        if (2 * s > total) continue;
        if (s > best) {
            best = s;
            best_l = ml;
            best_r = it->second;
        }
    }
    MmsResult r{Rational(best, v.scale), std::vector<Bundle>(2)};
    for (int e = 0; e < m; ++e) {
        bool side = e < h ? (best_l >> e & 1) : (best_r >> (e - h) & 1);
        r.partition[side ? 0 : 1].push_back(e);
    }
    return r;
}

// Largest value an EFX-respecting bundle holder must still beat: max over e of v(B \ e).
Value efx_threshold(const Valuation& v, const std::vector<int>& items) {
    if (items.empty()) return 0;
    if (v.kind == Kind::UnitDemand) {
        if (items.size() < 2) return 0;
        Value top = 0;
        for (int e : items) top = std::max(top, v.values[e]);
        return top;
    }
    Value sum = 0, lo = std::numeric_limits<Value>::max();
    for (int e : items) {
        sum += v.values[e];
        lo = std::min(lo, v.values[e]);
    }
    return sum - lo;
}

// Can the given items be split into `parts` bundles each with efx_threshold <= t?
bool efx_split(const Valuation& v, const std::vector<int>& items, int parts, Value t) {
    std::vector<std::vector<int>> bins(parts);
    std::function<bool(std::size_t, int)> go = [&](std::size_t k, int used) -> bool {
        if (k == items.size()) return true;
        int limit = std::min(used + 1, parts);
        for (int j = 0; j < limit; ++j) {
            bins[j].push_back(items[k]);
            if (efx_threshold(v, bins[j]) <= t && go(k + 1, std::max(used, j + 1))) return true;
            bins[j].pop_back();
        }
        return false;
    };
    return go(0, 0);
}

}  // namespace

Rational prop_share(const Valuation& v, int n) {
    require_additive(v, "prop_share");
    require_agents(n);
    return Rational(v.total(), v.scale * n);
}

Rational tps_with_order(const Valuation& v, int n, const std::vector<int>& priority) {
    require_additive(v, "tps");
    require_agents(n);
    std::vector<bool> gone(v.m(), false);
    Value sum = v.total();
    int agents = n;
    for (;;) {
        if (agents == 0) return 0;
        int pick = -1;
        for (int e : priority)
            if (!gone[e] && v.values[e] * agents > sum) {
                pick = e;
                break;
            }
        if (pick < 0) return Rational(sum, v.scale * agents);
        gone[pick] = true;
        sum -= v.values[pick];
        --agents;
    }
}

Rational tps(const Valuation& v, int n) {
    std::vector<int> order(v.m());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return v.values[x] > v.values[y]; });
    return tps_with_order(v, n, order);
}

MmsResult mms_exact(const Valuation& v, int n, const ShareCaps& caps) {
    require_agents(n);
    if (n == 1) {
        Bundle all(v.m());
        std::iota(all.begin(), all.end(), 0);
        return {Rational(v.total(), v.scale), {all}};
    }
    if (v.m() <= caps.max_items && n <= caps.max_agents) return MaximinSearch(v, n).run();
    if (n == 2 && v.additive() && v.m() <= caps.two_agent_items) return two_agent_subset_sum(v);
    throw CapacityError("mms_exact: instance with n=" + std::to_string(n) + ", m=" + std::to_string(v.m()) +
                        " exceeds the brute-force cap");
}

Rational mms_binary(const Valuation& v, int n) {
    if (v.kind != Kind::BinaryAdditive) throw UsageError("mms_binary needs a binary valuation");
    require_agents(n);
    Value ones = std::count_if(v.values.begin(), v.values.end(), [](Value x) { return x != 0; });
    return Rational(ones / n);
}

Rational mms_unit_demand(const Valuation& v, int n) {
    if (v.kind != Kind::UnitDemand) throw UsageError("mms_unit_demand needs a unit-demand valuation");
    require_agents(n);
    if (v.m() < n) return 0;
    std::vector<Value> sorted = v.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return Rational(sorted[n - 1], v.scale);
}

Value mms_two_valued_counts(int a_items, int b_items, Value a, Value b, int n) {
    require_agents(n);
    const Value inf = std::numeric_limits<Value>::max() / 4;
    // Fewest b-items a bundle with x a-items needs to reach t.
    auto need_b = [&](Value t, int x) -> Value {
        Value gap = t - x * a;
        if (gap <= 0) return 0;
        if (b == 0) return inf;
        return (gap + b - 1) / b;
    };
    auto feasible = [&](Value t) {
        std::vector<Value> cost(a_items + 1, inf);
        cost[0] = 0;
        for (int j = 0; j < n; ++j) {
            std::vector<Value> next(a_items + 1, inf);
            for (int used = 0; used <= a_items; ++used) {
                if (cost[used] >= inf) continue;
                for (int x = 0; used + x <= a_items; ++x) {
                    Value nb = need_b(t, x);
                    if (nb >= inf) continue;
                    next[used + x] = std::min(next[used + x], cost[used] + nb);
                }
            }
            cost.swap(next);
        }
        return *std::min_element(cost.begin(), cost.end()) <= b_items;
    };
    std::vector<Value> candidates;
    for (int x = 0; x <= a_items; ++x)
        for (int y = 0; y <= b_items; ++y) candidates.push_back(x * a + y * b);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::size_t lo = 0, hi = candidates.size() - 1;  // candidates[0] == 0 is always feasible
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (feasible(candidates[mid]))
            lo = mid;
        else
            hi = mid - 1;
    }
    return candidates[lo];
}

Rational mms_two_valued(const Valuation& v, int n) {
    if (v.kind != Kind::TwoValued) throw UsageError("mms_two_valued needs a two-valued valuation");
    int a_items = static_cast<int>(std::count(v.values.begin(), v.values.end(), v.a));
    return Rational(mms_two_valued_counts(a_items, v.m() - a_items, v.a, v.b, n), v.scale);
}

Rational mms_share(const Valuation& v, int n, const ShareCaps& caps) {
    require_agents(n);
    if (n == 1) return Rational(v.total(), v.scale);
    switch (v.kind) {
        case Kind::UnitDemand: return mms_unit_demand(v, n);
        case Kind::BinaryAdditive: return mms_binary(v, n);
        case Kind::TwoValued: return mms_two_valued(v, n);
        case Kind::Additive: return mms_exact(v, n, caps).value;
    }
    return 0;
}

Rational mxs_exact(const Valuation& v, int n, const ShareCaps& caps) {
    require_agents(n);
    if (n == 1) return Rational(v.total(), v.scale);
    if (v.m() > caps.max_items || n > caps.max_agents)
        throw CapacityError("mxs_exact: instance exceeds the brute-force cap");
    const int m = v.m();
    std::vector<std::pair<Value, std::uint32_t>> subsets;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        Bundle s;
        for (int e = 0; e < m; ++e)
            if (mask >> e & 1) s.push_back(e);
        subsets.push_back({raw_value(v, s), mask});
    }
    std::sort(subsets.begin(), subsets.end());
    for (const auto& [val, mask] : subsets) {
        std::vector<int> rest;
        for (int e = 0; e < m; ++e)
            if (!(mask >> e & 1)) rest.push_back(e);
        if (efx_split(v, rest, n - 1, val)) return Rational(val, v.scale);
    }
    throw ProtocolFailure("mxs_exact found no EFX-acceptable bundle");
}

ShareProfile share_profile(const Valuation& v, int n, bool with_mms, bool with_mxs) {
    ShareProfile p{prop_share(v, n), tps(v, n), std::nullopt, std::nullopt};
    if (with_mms) p.mms = mms_share(v, n);
    if (with_mxs) p.mxs = mxs_exact(v, n);
    return p;
}

Valuation truncate_over_proportional(const Valuation& v, int n) {
    require_additive(v, "truncate_over_proportional");
    Rational cap = tps(v, n) * v.scale;  // in raw units, possibly fractional
    bool changed = std::any_of(v.values.begin(), v.values.end(), [&](Value x) { return Rational(x) > cap; });
    if (!changed) return v;
    Value den = cap.denominator();
    Valuation out{Kind::Additive, {}, v.scale * den, 0, 0};
    for (Value x : v.values) out.values.push_back(Rational(x) > cap ? cap.numerator() : x * den);
    return out;
}

}  // namespace fairalloc
