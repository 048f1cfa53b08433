#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace fairalloc::detail {
namespace {

int lowest_differing_bit(std::uint64_t x, std::uint64_t y) {
    std::uint64_t d = x ^ y;
    if (d == 0) throw ProtocolFailure("identical names have no differing bit");
    int p = 0;
    while (((d >> p) & 1) == 0) ++p;
    return p;
}

int count_marked(const std::vector<char>& mark, const std::vector<int>& items) {
    int c = 0;
    for (int e : items) c += mark[e];
    return c;
}

// First two positions in items holding marked items.
std::pair<int, int> two_marked_positions(const std::vector<char>& mark, const std::vector<int>& items) {
    int first = -1;
    for (int p = 0; p < static_cast<int>(items.size()); ++p)
        if (mark[items[p]]) {
            if (first < 0)
                first = p;
            else
                return {first, p};
        }
    throw ProtocolFailure("bundle holds fewer than two distinguished items");
}

std::pair<std::vector<int>, std::vector<int>> split_by_bit(const std::vector<int>& items,
                                                            const std::vector<std::uint64_t>& name, int bit) {
    std::vector<int> zero, one;
    for (std::size_t p = 0; p < items.size(); ++p) (((name[p] >> bit) & 1) ? one : zero).push_back(items[p]);
    return {zero, one};
}

Allocation from_holdings(const Public& pub, const std::vector<std::vector<int>>& held) {
    return Allocation::from_bundles(pub.n, pub.m, held);
}

void require_ud(const Public& pub, const char* id) { require_kind(pub, pub.kind == Kind::UnitDemand, id, "unit-demand"); }

}  // namespace

Outcome ud2(const Public& pub, Channel& ch, const Crs& crs, const std::string& variant) {
    const char* id = "two-agent unit-demand protocol";
    require_ud(pub, id);
    require_n(pub, 2, 2, id);
    require(pub.m >= 2, "two-agent unit-demand protocol needs m >= 2");
    const int m = pub.m;
    auto pair_of = [](const Valuation& v) { return top_items(v, 2); };
    auto top_of = [](const Valuation& v) { return top_items(v, 1)[0]; };
    Outcome out;
    out.allocation = Allocation(2, m, 1);

    if (variant == "naive") {
        int a0 = static_cast<int>(ch.choice(0, "pair", m, [&](const Valuation& v) { return pair_of(v)[0]; }));
        int a1 = static_cast<int>(ch.choice(0, "pair", m, [&](const Valuation& v) { return pair_of(v)[1]; }));
        int b_top = static_cast<int>(ch.choice(1, "pair", m, top_of));
        ch.choice(1, "pair", m, [&](const Valuation& v) {
            auto p = pair_of(v);
            return p[0] == top_of(v) ? p[1] : p[0];
        });
        out.allocation.owner[a0 != b_top ? a0 : a1] = 0;
    } else if (variant == "announce") {
        int pick = static_cast<int>(ch.choice(0, "item", m, top_of));
        out.allocation.owner[pick] = 0;
    } else if (variant == "bitsplit" || variant == "randomized") {
        std::vector<std::uint64_t> name(m);
        std::vector<int> items = all_items(m);
        int bit = 0;
        if (variant == "bitsplit") {
            for (int e = 0; e < m; ++e) name[e] = static_cast<std::uint64_t>(e);
            bit = static_cast<int>(ch.choice(0, "split", ceil_log2(m), [&](const Valuation& v) {
                auto p = pair_of(v);
                return lowest_differing_bit(name[p[0]], name[p[1]]);
            }));
        } else {
            auto perm = crs.stream("ud2-names").permutation(1 << ceil_log2(m));
            for (int e = 0; e < m; ++e) name[e] = static_cast<std::uint64_t>(perm[e]);
            bit = static_cast<int>(ch.unary(0, "split", [&](const Valuation& v) {
                      auto p = pair_of(v);
                      return lowest_differing_bit(name[p[0]], name[p[1]]) + 1;
                  })) - 1;
        }
        bool side = ch.bit(1, "side", [&](const Valuation& v) { return ((name[top_of(v)] >> bit) & 1) != 0; });
        auto [zero, one] = split_by_bit(items, name, bit);
        for (int e : side ? zero : one) out.allocation.owner[e] = 0;
    } else {
        throw UsageError("unknown two-agent variant '" + variant + "'");
    }
    return out;
}

Outcome identical_ud(const Public& pub, Channel& ch, const Crs& crs) {
    require_ud(pub, "identical-ud");
    require(pub.n >= 1 && pub.m >= pub.n, "identical-ud needs m >= n >= 1");
    const int n = pub.n;
    Outcome out;
    if (n == 1) {
        out.allocation = Allocation(1, pub.m, 0);
        return out;
    }
    // Reply alphabet: (class of part one, class of part two), classes 0, 1, 2 meaning "more than one".
    static const std::pair<int, int> kOutcomes[] = {{0, 2}, {2, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}};
    std::vector<std::vector<int>> work{all_items(pub.m)}, done;
    std::vector<int> zero_pile;
    int query = 0;
    while (!work.empty()) {
        std::vector<int> set = std::move(work.back());
        work.pop_back();
        Stream rng = crs.stream("identical-ud", static_cast<std::uint64_t>(query++));
        std::vector<int> part[2];
        for (int e : set) part[rng.coin() ? 1 : 0].push_back(e);
        auto reply = ch.choice(0, "query", 6, [&](const Valuation& v) {
            auto mark = distinguished(v, n);
            std::pair<int, int> cls{std::min(count_marked(mark, part[0]), 2), std::min(count_marked(mark, part[1]), 2)};
            return static_cast<std::uint64_t>(std::find(std::begin(kOutcomes), std::end(kOutcomes), cls) - std::begin(kOutcomes));
        });
        const int cls[2] = {kOutcomes[reply].first, kOutcomes[reply].second};
        for (int s = 0; s < 2; ++s) {
            if (cls[s] == 0)
                zero_pile.insert(zero_pile.end(), part[s].begin(), part[s].end());
            else if (cls[s] == 1)
                done.push_back(part[s]);
            else
                work.push_back(part[s]);
        }
        if (static_cast<int>(done.size()) > n) throw ProtocolFailure("identical-ud: probe replies inconsistent with n top items");
    }
    if (static_cast<int>(done.size()) != n) throw ProtocolFailure("identical-ud: probe replies inconsistent with n top items");
    done[0].insert(done[0].end(), zero_pile.begin(), zero_pile.end());
    out.allocation = from_holdings(pub, done);
    out.diag.queries = query;
    return out;
}

Outcome ud_det(const Public& pub, Channel& ch, const Crs&) {
    require_ud(pub, "ud-det");
    require(pub.n >= 1 && pub.m >= 2 * pub.n, "ud-det needs m >= 2n");
    const int n = pub.n, m = pub.m;
    std::vector<std::vector<int>> held(n);
    for (int i = 0; i < n; ++i)
        for (int e = static_cast<int>(static_cast<long long>(i) * m / n); e < static_cast<long long>(i + 1) * m / n; ++e)
            held[i].push_back(e);
    auto satisfied = [&](int agent) {
        return ch.bit(agent, "sat", [&](const Valuation& v) { return count_marked(distinguished(v, n), held[agent]) > 0; });
    };
    std::vector<char> sat(n);
    for (int i = 0; i < n; ++i) sat[i] = satisfied(i);

    for (;;) {
        int i = static_cast<int>(std::find(sat.begin(), sat.end(), 0) - sat.begin());
        if (i == n) break;
        std::vector<int> others;
        for (int j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        auto swap_target = [&](const std::vector<char>& mark) {
            for (int p = 0; p < n - 1; ++p)
                if (!sat[others[p]] && count_marked(mark, held[others[p]]) > 0) return p;
            return -1;
        };
        bool swap_case = ch.bit(i, "case", [&](const Valuation& v) { return swap_target(distinguished(v, n)) >= 0; });
        int target = others[ch.choice(i, "name", n - 1, [&](const Valuation& v) {
            auto mark = distinguished(v, n);
            if (swap_case) return swap_target(mark);
            for (int p = 0; p < n - 1; ++p)
                if (count_marked(mark, held[others[p]]) >= 2) return p;
            throw ProtocolFailure("ud-det: no bundle with two distinguished items");
        })];
        if (swap_case) {
            std::swap(held[i], held[target]);
            sat[i] = 1;
            sat[target] = satisfied(target);
            continue;
        }
        const std::vector<int> split = held[target];
        const int s = static_cast<int>(split.size());
        std::vector<std::uint64_t> name(s);
        for (int p = 0; p < s; ++p) name[p] = static_cast<std::uint64_t>(p);
        int bit = static_cast<int>(ch.choice(i, "split", ceil_log2(s), [&](const Valuation& v) {
            auto [x, y] = two_marked_positions(distinguished(v, n), split);
            return lowest_differing_bit(name[x], name[y]);
        }));
        auto [zero, one] = split_by_bit(split, name, bit);
        bool keep_one = ch.bit(target, "keep", [&](const Valuation& v) {
            auto mark = distinguished(v, n);
            return count_marked(mark, zero) == 0 && count_marked(mark, one) > 0;
        });
        std::vector<int> kept = keep_one ? one : zero, given = keep_one ? zero : one;
        const std::size_t topup = split.size() - kept.size();
        if (topup > held[i].size()) throw ProtocolFailure("ud-det: bundle sizes drifted apart");
        kept.insert(kept.end(), held[i].begin(), held[i].begin() + static_cast<long>(topup));
        given.insert(given.end(), held[i].begin() + static_cast<long>(topup), held[i].end());
        held[target] = kept;
        held[i] = given;
        sat[i] = 1;
    }
    Outcome out;
    out.allocation = from_holdings(pub, held);
    return out;
}

Outcome rud(const Public& pub, Channel& ch, const Crs& crs) {
    require_ud(pub, "rud");
    require(pub.n >= 1 && pub.m >= 2 * pub.n, "rud needs m >= 2n");
    const int n = pub.n, m = pub.m;
    std::vector<std::vector<int>> content(n);
    std::vector<int> holder(n), bundle_of(n);
    Stream initial = crs.stream("rud-initial");
    for (int e = 0; e < m; ++e) content[initial.below(n)].push_back(e);
    for (int i = 0; i < n; ++i) holder[i] = bundle_of[i] = i;
    Outcome out;
    auto satisfied = [&](int agent) {
        return ch.bit(agent, "sat", [&](const Valuation& v) {
            return count_marked(distinguished(v, n), content[bundle_of[agent]]) > 0;
        });
    };
    std::vector<char> sat(n);
    for (int i = 0; i < n; ++i) sat[i] = satisfied(i);

    for (int step = 0;; ++step) {
        int i = static_cast<int>(std::find(sat.begin(), sat.end(), 0) - sat.begin());
        if (i == n) break;
        const int unsatisfied = static_cast<int>(std::count(sat.begin(), sat.end(), 0));
        // A fresh random order each turn keeps the first eligible bundle's rank independent of past turns.
        std::vector<int> cands;
        for (int id : crs.stream("rud-order", static_cast<std::uint64_t>(step)).permutation(2 * n))
            if (id < static_cast<int>(content.size()) && id != bundle_of[i]) cands.push_back(id);

        auto r = ch.uint(i, "rank", [&](const Valuation& v) {
            auto mark = distinguished(v, n);
            std::uint64_t first = cands.size(), eligible = 0;
            for (std::size_t p = 0; p < cands.size(); ++p) {
                int id = cands[p], h = holder[id], c = count_marked(mark, content[id]);
                bool ok = (h < 0 || !sat[h]) ? c >= 1 : c >= 2;
                if (!ok) continue;
                ++eligible;
                first = std::min<std::uint64_t>(first, p);
            }
            double fk = std::ceil(static_cast<double>(unsatisfied) * unsatisfied / (std::exp(2.0) * n));
            out.diag.snapshots.push_back({unsatisfied, static_cast<int>(eligible), static_cast<int>(fk)});
            if (first == cands.size()) throw ProtocolFailure("rud: no eligible bundle");
            return first;
        });
        if (r >= cands.size()) throw ProtocolFailure("rud: bundle rank out of range");
        out.diag.eligible_ranks.push_back(static_cast<int>(r));
        const int id = cands[r], h = holder[id], old = bundle_of[i];
        if (h < 0 || !sat[h]) {
            holder[old] = h;
            if (h >= 0) bundle_of[h] = old;
            holder[id] = i;
            bundle_of[i] = id;
            sat[i] = 1;
            if (h >= 0) sat[h] = satisfied(h);
            continue;
        }
        const std::vector<int> split = content[id];
        const int s = static_cast<int>(split.size());
        auto perm = crs.stream("rud-split", static_cast<std::uint64_t>(step)).permutation(1 << ceil_log2(s));
        std::vector<std::uint64_t> name(perm.begin(), perm.begin() + s);
        int bit = static_cast<int>(ch.unary(i, "split", [&](const Valuation& v) {
                      auto [x, y] = two_marked_positions(distinguished(v, n), split);
                      return lowest_differing_bit(name[x], name[y]) + 1;
                  })) - 1;
        auto [zero, one] = split_by_bit(split, name, bit);
        bool keep_one = ch.bit(h, "keep", [&](const Valuation& v) {
            auto mark = distinguished(v, n);
            return count_marked(mark, zero) == 0 && count_marked(mark, one) > 0;
        });
        if (static_cast<int>(content.size()) >= 2 * n) throw ProtocolFailure("rud: more than n auxiliary bundles");
        content[id] = keep_one ? one : zero;
        content.push_back(keep_one ? zero : one);
        holder.push_back(i);
        holder[old] = -1;
        bundle_of[i] = static_cast<int>(content.size()) - 1;
        sat[i] = 1;
    }
    std::vector<std::vector<int>> held(n);
    for (int id = 0; id < static_cast<int>(content.size()); ++id) {
        auto& dst = held[holder[id] < 0 ? 0 : holder[id]];
        dst.insert(dst.end(), content[id].begin(), content[id].end());
    }
    out.allocation = from_holdings(pub, held);
    return out;
}

Outcome ud_ef1(const Public& pub, Channel& ch, const Crs& crs, bool bundled, const RunOptions& opts) {
    require_ud(pub, "ud-ef1");
    require(pub.n >= 1, "ud-ef1 needs n >= 1");
    const int n = pub.n, m = pub.m;
    const long long cube = static_cast<long long>(n) * n * n;
    Outcome out;
    std::vector<std::vector<int>> units;
    if (bundled && m > cube) {
        const int count = static_cast<int>(cube);
        std::vector<int> unit_of(m);
        for (int attempt = 0;; ++attempt) {
            if (attempt >= opts.max_attempts) throw ProtocolFailure("ud-ef1: bundling never became unanimous");
            Stream rng = crs.stream("ud-ef1-bundles", static_cast<std::uint64_t>(attempt));
            for (int e = 0; e < m; ++e) unit_of[e] = static_cast<int>(rng.below(count));
            bool unanimous = true;
            for (int i = 0; i < n; ++i)
                unanimous &= ch.bit(i, "vote", [&](const Valuation& v) {
                    std::vector<char> used(count, 0);
                    for (int e : top_items(v, n))
                        if (used[unit_of[e]]++) return false;
                    return true;
                });
            if (unanimous) break;
            ++out.diag.retries;
        }
        units.assign(count, {});
        for (int e = 0; e < m; ++e) units[unit_of[e]].push_back(e);
        out.diag.bundles = count;
    } else {
        for (int e = 0; e < m; ++e) units.push_back({e});
    }
    std::vector<int> remaining = all_items(static_cast<int>(units.size()));
    std::vector<std::vector<int>> held(n);
    for (int i = 0; i + 1 < n; ++i) {
        auto p = ch.choice(i, "pick", remaining.size(), [&](const Valuation& v) {
            std::size_t best = 0;
            Value best_value = -1;
            for (std::size_t q = 0; q < remaining.size(); ++q) {
                Value x = raw_value(v, units[remaining[q]]);
                if (x > best_value) best = q, best_value = x;
            }
            return best;
        });
        held[i] = units[remaining[p]];
        remaining.erase(remaining.begin() + static_cast<long>(p));
        if (remaining.empty()) break;
    }
    for (int u : remaining) held[n - 1].insert(held[n - 1].end(), units[u].begin(), units[u].end());
    out.allocation = from_holdings(pub, held);
    return out;
}

}  // namespace fairalloc::detail
