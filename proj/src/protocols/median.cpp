#include <algorithm>

#include "internal.hpp"

namespace fairalloc::detail {

std::vector<Leaf> median_decompose(Channel& ch, const Crs& crs, int n_total, const std::vector<int>& agents, int length,
                                   int min_cut, const CutFn& cut, bool randomized, const std::string& tag) {
    std::vector<Leaf> leaves(n_total);
    std::vector<int> pivot_rank(n_total);
    if (randomized) {
        auto perm = crs.stream(tag + "-pivots").permutation(n_total);
        for (int r = 0; r < n_total; ++r) pivot_rank[perm[r]] = r;
    }
    const std::string cut_label = tag + "-cut", pivot_label = tag + "-pivot", cmp_label = tag + "-cmp";

    std::function<void(std::vector<int>, int, int, int)> solve = [&](std::vector<int> group, int lo, int hi, int base) {
        if (group.empty()) return;
        if (group.size() == 1) {
            leaves[group[0]] = Leaf{lo, hi, base};
            return;
        }
        const int j = static_cast<int>(group.size()) / 2;
        const int index = base + j;
        const int lower = std::min(std::max(lo, min_cut), hi);
        const auto count = static_cast<std::uint64_t>(hi - lower + 1);
        auto reported = [&](int agent, const Valuation& v) { return std::clamp(cut(agent, v, index), lower, hi); };

        std::vector<int> left, right;
        int median = lower;
        if (!randomized) {
            std::vector<std::pair<int, int>> reports;
            for (int agent : group) {
                auto r = ch.choice(agent, cut_label, count, [&](const Valuation& v) { return reported(agent, v) - lower; });
                reports.emplace_back(static_cast<int>(r) + lower, agent);
            }
            std::sort(reports.begin(), reports.end());
            median = reports[j - 1].first;
            for (int r = 0; r < static_cast<int>(reports.size()); ++r) (r < j ? left : right).push_back(reports[r].second);
        } else {
            std::vector<int> cand = group;
            int target = j;
            for (;;) {
                int pivot = *std::min_element(cand.begin(), cand.end(),
                                              [&](int x, int y) { return pivot_rank[x] < pivot_rank[y]; });
                int value = static_cast<int>(ch.choice(pivot, pivot_label, count, [&](const Valuation& v) {
                                return reported(pivot, v) - lower;
                            })) + lower;
                std::vector<int> less, greater;
                for (int agent : cand) {
                    if (agent == pivot) continue;
                    bool below = ch.bit(agent, cmp_label, [&](const Valuation& v) {
                        int c = reported(agent, v);
                        return c < value || (c == value && agent < pivot);
                    });
                    (below ? less : greater).push_back(agent);
                }
                const int lt = static_cast<int>(less.size());
                if (lt >= target) {
                    right.insert(right.end(), greater.begin(), greater.end());
                    right.push_back(pivot);
                    cand = less;
                } else {
                    left.insert(left.end(), less.begin(), less.end());
                    left.push_back(pivot);
                    target -= lt + 1;
                    if (target == 0) {
                        median = value;
                        right.insert(right.end(), greater.begin(), greater.end());
                        break;
                    }
                    cand = greater;
                }
            }
        }
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
        solve(left, lo, median, base);
        solve(right, median, hi, base + j);
    };

    std::vector<int> group = agents;
    std::sort(group.begin(), group.end());
    solve(group, 0, length, 0);
    return leaves;
}

SemiContiguous build_semi(int n, int m, const std::vector<int>& seq, const std::vector<Leaf>& leaves,
                          const std::vector<int>& hole) {
    SemiContiguous sc;
    sc.block_begin.assign(n, m);
    sc.block_end.assign(n, m);
    sc.hole = hole;
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (leaves[i].bundle >= 0) order.push_back(i);
    if (order.empty()) {
        // Nobody holds a range; the last agent's block absorbs every non-hole item.
        sc.block_begin[n - 1] = 0;
        return sc;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return std::tie(leaves[x].lo, leaves[x].hi, x) < std::tie(leaves[y].lo, leaves[y].hi, y);
    });
    auto item_at = [&](int pos) { return pos < static_cast<int>(seq.size()) ? seq[pos] : m; };
    for (std::size_t k = 0; k < order.size(); ++k) {
        sc.block_begin[order[k]] = k == 0 ? 0 : item_at(leaves[order[k]].lo);
        sc.block_end[order[k]] = k + 1 < order.size() ? item_at(leaves[order[k + 1]].lo) : m;
    }
    return sc;
}

}  // namespace fairalloc::detail
