#include "fairalloc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <boost/dynamic_bitset.hpp>

#include "parallel.hpp"

namespace fairalloc {
namespace {

using Coverage = boost::dynamic_bitset<>;

int bits_for(std::uint64_t k) {
    int b = 0;
    while ((std::uint64_t{1} << b) < k) ++b;
    return b;
}

std::int64_t param(const FamilyParams& p, const std::string& key, std::int64_t fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

// Answers "is this allocation fair for this instance" with per-agent shares computed once.
class Judge {
public:
    Judge(const Instance& inst, Notion notion, const ShareCaps& caps) : inst_(inst), notion_(notion), caps_(caps) {
        if (notion == Notion::MMS || notion == Notion::MXS) {
            for (const auto& v : inst.agents)
                shares_.push_back(notion == Notion::MMS ? mms_share(v, inst.n, caps) : mxs_exact(v, inst.n, caps));
        }
    }

    bool fair(const Allocation& alloc) const {
        if (notion_ == Notion::Any) return true;
        if (shares_.empty()) return all_pass(check_notion(inst_, alloc, notion_, Rational(0), caps_));
        auto bundles = alloc.bundles();
        for (int i = 0; i < inst_.n; ++i)
            if (value_of(inst_.agents[i], bundles[i]) < shares_[i]) return false;
        return true;
    }

private:
    const Instance& inst_;
    Notion notion_;
    ShareCaps caps_;
    std::vector<Rational> shares_;
};

void require_common_shape(const std::vector<Instance>& instances, int& n, int& m) {
    n = instances.front().n;
    m = instances.front().m;
    for (const auto& inst : instances) {
        inst.validate();
        if (inst.n != n || inst.m != m) throw UsageError("hitting set instances must share n and m");
    }
}

struct Cover {
    std::vector<Coverage> sets;       // per candidate, over instances
    std::vector<int> origin;          // candidate index in the caller's list
    std::vector<std::vector<int>> by_instance;  // reduced candidates covering each instance
};

Cover build_cover(const std::vector<Instance>& instances, Notion notion, const std::vector<Allocation>& candidates,
                  const HittingSetBudget& budget) {
    std::vector<Judge> judges;
    judges.reserve(instances.size());
    for (const auto& inst : instances) judges.emplace_back(inst, notion, budget.caps);
    std::vector<Coverage> raw(candidates.size(), Coverage(instances.size()));
    detail::parallel_for(candidates.size(), budget.threads, [&](int, std::size_t c) {
        for (std::size_t k = 0; k < instances.size(); ++k) raw[c][k] = judges[k].fair(candidates[c]);
    });

    Cover cover;
    std::map<Coverage, int> seen;
    for (std::size_t c = 0; c < raw.size(); ++c) {
        if (raw[c].none() || !seen.emplace(raw[c], static_cast<int>(c)).second) continue;
        cover.sets.push_back(raw[c]);
        cover.origin.push_back(static_cast<int>(c));
    }
    if (cover.sets.size() <= 4096) {
        std::vector<char> dominated(cover.sets.size(), 0);
        for (std::size_t a = 0; a < cover.sets.size(); ++a)
            for (std::size_t b = 0; b < cover.sets.size() && !dominated[a]; ++b)
                if (a != b && !dominated[b] && cover.sets[a].is_proper_subset_of(cover.sets[b])) dominated[a] = 1;
        Cover kept;
        for (std::size_t a = 0; a < cover.sets.size(); ++a)
            if (!dominated[a]) kept.sets.push_back(cover.sets[a]), kept.origin.push_back(cover.origin[a]);
        cover = std::move(kept);
    }
    cover.by_instance.assign(instances.size(), {});
    for (std::size_t c = 0; c < cover.sets.size(); ++c)
        for (std::size_t k = cover.sets[c].find_first(); k != Coverage::npos; k = cover.sets[c].find_next(k))
            cover.by_instance[k].push_back(static_cast<int>(c));
    for (std::size_t k = 0; k < instances.size(); ++k)
        if (cover.by_instance[k].empty())
            throw InfeasibleError("instance " + std::to_string(k) + " is served fairly by no candidate allocation");
    return cover;
}

std::vector<int> greedy_cover(const Cover& cover, std::size_t universe) {
    Coverage uncovered(universe);
    uncovered.set();
    std::vector<int> chosen;
    while (uncovered.any()) {
        std::size_t best = 0, best_gain = 0;
        for (std::size_t c = 0; c < cover.sets.size(); ++c) {
            std::size_t gain = (cover.sets[c] & uncovered).count();
            if (gain > best_gain) best = c, best_gain = gain;
        }
        chosen.push_back(static_cast<int>(best));
        uncovered -= cover.sets[best];
    }
    return chosen;
}

class ExactSearch {
public:
    ExactSearch(const Cover& cover, std::size_t universe, std::uint64_t max_nodes)
        : cover_(cover), universe_(universe), max_nodes_(max_nodes) {
        for (const auto& s : cover.sets) widest_ = std::max(widest_, s.count());
    }

    // Cover of exactly `size` sets if one exists; sets out_of_budget when the node budget ran out.
    std::optional<std::vector<int>> find(int size) {
        Coverage uncovered(universe_);
        uncovered.set();
        path_.clear();
        if (dfs(uncovered, size)) return path_;
        return std::nullopt;
    }

    std::uint64_t nodes() const { return nodes_; }
    bool out_of_budget() const { return out_of_budget_; }
    std::size_t widest() const { return widest_; }

private:
    bool dfs(const Coverage& uncovered, int left) {
        if (uncovered.none()) return true;
        if (left == 0 || out_of_budget_) return false;
        if (++nodes_ > max_nodes_) {
            out_of_budget_ = true;
            return false;
        }
        if (uncovered.count() > widest_ * static_cast<std::size_t>(left)) return false;
        // Branch on the uncovered instance with the fewest covering candidates.
        std::size_t pivot = uncovered.find_first(), fewest = cover_.by_instance[pivot].size();
        for (std::size_t k = uncovered.find_next(pivot); k != Coverage::npos; k = uncovered.find_next(k))
            if (cover_.by_instance[k].size() < fewest) pivot = k, fewest = cover_.by_instance[k].size();
        for (int c : cover_.by_instance[pivot]) {
            path_.push_back(c);
            if (dfs(uncovered - cover_.sets[c], left - 1)) return true;
            path_.pop_back();
            if (out_of_budget_) return false;
        }
        return false;
    }

    const Cover& cover_;
    std::size_t universe_;
    std::uint64_t max_nodes_;
    std::uint64_t nodes_ = 0;
    bool out_of_budget_ = false;
    std::size_t widest_ = 0;
    std::vector<int> path_;
};

HittingSetResult finish_hitting_set(const std::vector<Instance>& instances, Notion notion,
                                    const std::vector<Allocation>& candidates, const Cover& cover,
                                    const std::vector<int>& chosen, bool exact, std::uint64_t nodes,
                                    const ShareCaps& caps) {
    HittingSetResult r;
    for (int c : chosen) r.allocations.push_back(candidates[cover.origin[c]]);
    r.size = static_cast<int>(r.allocations.size());
    r.exact = exact;
    r.description_bits = bits_for(static_cast<std::uint64_t>(r.size));
    r.nodes = nodes;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        bool served = false;
        for (const auto& a : r.allocations)
            if (all_pass(check_notion(instances[k], a, notion, Rational(0), caps))) {
                served = true;
                break;
            }
        if (!served) throw ProtocolFailure("hitting set misses instance " + std::to_string(k));
    }
    return r;
}

Instance identical_instance(Kind kind, int n, const std::vector<Value>& row, Value scale = 1, Value a = 0,
                            Value b = 0) {
    return make_instance(kind, std::vector<std::vector<Value>>(n, row), scale, a, b);
}

std::vector<Value> indicator(int m, const std::vector<int>& chosen, Value on, Value off) {
    std::vector<Value> row(m, off);
    for (int e : chosen) row[e] = on;
    return row;
}

struct SupportShape {
    int ones = 0;       // chosen items per row
    bool identical = true;
};

std::optional<SupportShape> support_shape(Family family, int n, int m, const FamilyParams& params) {
    switch (family) {
        case Family::BinaryBalanced: {
            std::int64_t k = param(params, "k", m / (2 * n));
            if (k < 1 || m < 2 * k * n) throw InfeasibleError("binary_balanced needs k >= 1 and m >= 2kn");
            return SupportShape{static_cast<int>(k * n), true};
        }
        case Family::TwoValuedHard: {
            std::int64_t k = param(params, "k", (m - 1) / (2 * n));
            if (k < 1 || !(2 * k * n < m && m <= 2 * k * n + 2 * n))
                throw InfeasibleError("two_valued_hard needs k >= 1 and 2kn < m <= 2kn+2n");
            return SupportShape{static_cast<int>(k * n + n - 1), true};
        }
        case Family::Ef1Hard: {
            auto fallback = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(m), 0.75)));
            std::int64_t k = param(params, "k", fallback);
            if (k < 1 || k > m) throw InfeasibleError("ef1_hard needs 1 <= k <= m");
            return SupportShape{static_cast<int>(k), false};
        }
        default:
            return std::nullopt;
    }
}

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

std::vector<Allocation> all_allocations(int n, int m, std::uint64_t cap) {
    if (n < 1 || m < 0) throw UsageError("allocation space needs n >= 1 and m >= 0");
    std::uint64_t total = 1;
    for (int e = 0; e < m; ++e) {
        if (total > cap / static_cast<std::uint64_t>(n)) throw CapacityError("n^m allocations exceed the budget");
        total *= static_cast<std::uint64_t>(n);
    }
    if (total > cap) throw CapacityError("n^m allocations exceed the budget");
    std::vector<Allocation> out;
    out.reserve(total);
    Allocation a(n, m, 0);
    for (std::uint64_t t = 0; t < total; ++t) {
        out.push_back(a);
        for (int e = 0; e < m; ++e) {
            if (++a.owner[e] < n) break;
            a.owner[e] = 0;
        }
    }
    return out;
}

std::vector<Allocation> size_representatives(int n, int m) {
    if (n < 1 || m < 0) throw UsageError("allocation space needs n >= 1 and m >= 0");
    std::vector<Allocation> out;
    std::vector<int> sizes(n, 0);
    // Enumerates weak compositions of m into n parts in lexicographic order.
    auto emit = [&] {
        Allocation a(n, m, 0);
        int e = 0;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < sizes[i]; ++c) a.owner[e++] = i;
        out.push_back(std::move(a));
    };
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == n - 1) {
            sizes[i] = left;
            emit();
            return;
        }
        for (int s = 0; s <= left; ++s) {
            sizes[i] = s;
            self(self, i + 1, left - s);
        }
    };
    rec(rec, 0, m);
    return out;
}

HittingSetResult min_hitting_set(const std::vector<Instance>& instances, Notion notion,
                                 const HittingSetBudget& budget) {
    if (instances.empty()) return HittingSetResult{{}, 0, true, 0, 0};
    int n = 0, m = 0;
    require_common_shape(instances, n, m);
    return min_hitting_set(instances, notion, all_allocations(n, m, budget.max_allocations), budget);
}

HittingSetResult min_hitting_set(const std::vector<Instance>& instances, Notion notion,
                                 const std::vector<Allocation>& candidates, const HittingSetBudget& budget) {
    if (instances.empty()) return HittingSetResult{{}, 0, true, 0, 0};
    int n = 0, m = 0;
    require_common_shape(instances, n, m);
    for (const auto& a : candidates)
        if (a.n != n || a.m() != m) throw UsageError("candidate allocation shape differs from the instances");
    const Cover cover = build_cover(instances, notion, candidates, budget);
    const std::vector<int> greedy = greedy_cover(cover, instances.size());

    ExactSearch search(cover, instances.size(), budget.max_nodes);
    const int lower = static_cast<int>((instances.size() + search.widest() - 1) / search.widest());
    for (int size = std::max(lower, 1); size < static_cast<int>(greedy.size()); ++size) {
        auto found = search.find(size);
        if (found) return finish_hitting_set(instances, notion, candidates, cover, *found, true, search.nodes(), budget.caps);
        if (search.out_of_budget())
            return finish_hitting_set(instances, notion, candidates, cover, greedy, false, search.nodes(), budget.caps);
    }
    return finish_hitting_set(instances, notion, candidates, cover, greedy, true, search.nodes(), budget.caps);
}

std::optional<std::uint64_t> support_size(Family family, int n, int m, const FamilyParams& params) {
    auto shape = support_shape(family, n, m, params);
    if (!shape) return std::nullopt;
    Wide per_row = binomial(m, shape->ones), total = per_row;
    if (!shape->identical)
        for (int i = 1; i < n; ++i) {
            total *= per_row;
            if (total > Wide(~std::uint64_t{0})) return ~std::uint64_t{0};
        }
    if (total > Wide(~std::uint64_t{0})) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(total);
}

std::vector<Instance> enumerate_family(Family family, int n, int m, const FamilyParams& params, std::uint64_t cap) {
    auto shape = support_shape(family, n, m, params);
    if (!shape) throw UsageError("family " + to_string(family) + " has no exhaustive enumerator");
    const std::uint64_t total = *support_size(family, n, m, params);
    if (total > cap) throw CapacityError("family support of " + std::to_string(total) + " instances exceeds the budget");
    const auto per_row = static_cast<std::uint64_t>(binomial(m, shape->ones));
    std::vector<Instance> out;
    out.reserve(total);
    for (std::uint64_t t = 0; t < total; ++t) {
        if (family == Family::Ef1Hard) {
            std::vector<std::vector<Value>> rows;
            std::uint64_t rest = t;
            for (int i = 0; i < n; ++i, rest /= per_row)
                rows.push_back(indicator(m, subset_unrank(rest % per_row, m, shape->ones), 1, 0));
            out.push_back(make_instance(Kind::BinaryAdditive, rows));
            continue;
        }
        auto chosen = subset_unrank(t, m, shape->ones);
        if (family == Family::BinaryBalanced) {
            out.push_back(identical_instance(Kind::BinaryAdditive, n, indicator(m, chosen, 1, 0)));
        } else {
            const Value scale = m - shape->ones;
            out.push_back(identical_instance(Kind::TwoValued, n, indicator(m, chosen, scale, 1), scale, scale, 1));
        }
    }
    return out;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0, 1};
    const double t = static_cast<double>(trials), p = static_cast<double>(successes) / t, z2 = z * z;
    const double denom = 1 + z2 / t;
    const double center = (p + z2 / (2 * t)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / t + z2 / (4 * t * t)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

RdcEstimate estimate_rdc_bound(Family family, Notion notion, int n, int m, const Crs& crs, const RdcOptions& opts) {
    if (n < 1 || m < 1) throw UsageError("estimate_rdc_bound needs n >= 1 and m >= 1");
    std::vector<Allocation> candidates = opts.candidates;
    if (candidates.empty())
        candidates = opts.symmetric ? size_representatives(n, m) : all_allocations(n, m, opts.max_allocations);
    for (const auto& a : candidates)
        if (a.n != n || a.m() != m) throw UsageError("candidate allocation shape differs from (n, m)");

    std::vector<Instance> support;
    if (opts.exhaustive) support = enumerate_family(family, n, m, opts.params, opts.max_instances);
    const std::uint64_t trials = opts.exhaustive ? support.size() : opts.trials;
    if (trials == 0) throw UsageError("estimate_rdc_bound needs at least one trial");

    const int workers = detail::resolve_threads(opts.threads);
    std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(candidates.size(), 0));
    detail::parallel_for(trials, workers, [&](int w, std::size_t t) {
        Instance sampled;
        if (!opts.exhaustive)
            sampled = gen_instance(family, n, m, opts.params, derive_seed(crs.seed(), "rdc-instance", t));
        const Instance& inst = opts.exhaustive ? support[t] : sampled;
        Judge judge(inst, notion, opts.caps);
        for (std::size_t c = 0; c < candidates.size(); ++c) counts[w][c] += judge.fair(candidates[c]);
    });
    std::vector<std::uint64_t> total(candidates.size(), 0);
    for (const auto& row : counts)
        for (std::size_t c = 0; c < row.size(); ++c) total[c] += row[c];

    std::size_t best = 0;
    for (std::size_t c = 1; c < total.size(); ++c)
        if (total[c] > total[best]) best = c;
    RdcEstimate e;
    e.family = family, e.notion = notion, e.n = n, e.m = m;
    e.trials = trials;
    e.successes = candidates.empty() ? 0 : total[best];
    e.p_hat = static_cast<double>(e.successes) / static_cast<double>(trials);
    e.p_exact = Rational(static_cast<std::int64_t>(e.successes), static_cast<std::int64_t>(trials));
    auto ci = wilson_interval(e.successes, trials, opts.z);
    e.ci_low = ci.low, e.ci_high = ci.high;
    e.exhaustive = opts.exhaustive;
    if (!candidates.empty()) e.best = candidates[best];
    if (e.successes == 0) {
        e.lower_only = true;
        e.bound_bits = std::log2(static_cast<double>(trials));
    } else {
        e.bound_bits = std::log2(static_cast<double>(trials) / static_cast<double>(e.successes));
    }
    return e;
}

Allocation cyclic_allocation(int n, int rotation) {
    if (n < 1 || rotation < 1 || rotation > n) throw UsageError("cyclic allocation needs 1 <= rotation <= n");
    Allocation a(n, n + 1, n - 1);
    for (int i = 0; i + 1 < n; ++i) a.owner[(i + 1 + rotation) % (n + 1)] = i;
    return a;
}

CyclicResult cyclic_mms_dc(const Instance& inst) {
    inst.validate();
    if (inst.kind != Kind::UnitDemand) throw UsageError("cyclic construction needs unit-demand valuations");
    if (inst.m != inst.n + 1) throw UsageError("cyclic construction needs m = n + 1");
    const int n = inst.n;
    std::vector<std::vector<Value>> rows;
    for (const auto& v : inst.agents) rows.push_back(indicator(inst.m, top_items(v, n), 1, 0));
    const Instance image = make_instance(Kind::BinaryAdditive, rows);
    for (int j = 1; j <= n; ++j) {
        Allocation a = cyclic_allocation(n, j);
        if (all_pass(check_share(image, a, Notion::MMS))) return CyclicResult{j, a, bits_for(static_cast<std::uint64_t>(n))};
    }
    throw ProtocolFailure("no cyclic rotation gives every agent an MMS bundle");
}

std::string rdc_csv_header() { return "family,notion,n,m,trials,p_hat,ci_low,ci_high,bound_bits"; }

std::string rdc_csv_row(const RdcEstimate& e) {
    return to_string(e.family) + "," + to_string(e.notion) + "," + std::to_string(e.n) + "," + std::to_string(e.m) + "," +
           std::to_string(e.trials) + "," + fixed6(e.p_hat) + "," + fixed6(e.ci_low) + "," + fixed6(e.ci_high) + "," +
           fixed6(e.bound_bits);
}

}  // namespace fairalloc
