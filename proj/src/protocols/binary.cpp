#include <algorithm>

#include "internal.hpp"

namespace fairalloc::detail {

Outcome binary3p(const Public& pub, Channel& ch, const Crs& crs) {
    require_kind(pub, pub.kind == Kind::BinaryAdditive, "binary3p", "binary");
    require(pub.n >= 1, "binary3p needs n >= 1");
    const int n = pub.n, m = pub.m;
    const int padded = (m + n - 1) / n * n;  // dummy items m..padded-1 are worth 0 to everyone
    auto one = [&](const Valuation& v, int e) { return e < m && v.values[e] != 0; };
    auto ones_in = [&](const Valuation& v, const std::vector<int>& items) {
        int c = 0;
        for (int e : items) c += one(v, e);
        return c;
    };

    Outcome out;
    auto& diag = out.diag;
    diag.targets.assign(n, 0);
    diag.prefix_start.assign(n, -1);
    diag.prefix_length.assign(n, 0);

    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
        diag.targets[i] = static_cast<int>(ch.uint(i, "target", [&](const Valuation& v) {
            return static_cast<std::uint64_t>(ones_in(v, all_items(m)) / n);
        }));
        if (diag.targets[i] > 0) order.push_back(i);
    }
    const auto& target = diag.targets;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return target[x] < target[y]; });

    const std::vector<int> pi = crs.stream("binary3p-order").permutation(padded);
    std::vector<std::vector<int>> held(n);
    std::vector<int> happy, sad;
    int pos = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const int i = order[r];
        auto prefix_of = [&](const Valuation& v) {
            int c = 0;
            for (int p = pos; p < padded; ++p)
                if ((c += one(v, pi[p])) == target[i]) return p - pos + 1;
            return -1;
        };
        bool ok = ch.bit(i, "prefix-ok", [&](const Valuation& v) { return prefix_of(v) > 0; });
        if (!ok) {
            sad.assign(order.begin() + static_cast<long>(r), order.end());
            break;
        }
        // A prefix holding target ones has at least target items; only the excess is sent.
        int len = target[i] + static_cast<int>(ch.uint(i, "prefix", [&](const Valuation& v) {
                      return static_cast<std::uint64_t>(prefix_of(v) - target[i]);
                  }));
        if (pos + len > padded) throw ProtocolFailure("binary3p: prefix runs past the last item");
        held[i].assign(pi.begin() + pos, pi.begin() + pos + len);
        diag.prefix_start[i] = pos;
        diag.prefix_length[i] = len;
        pos += len;
        happy.push_back(i);
    }
    std::vector<int> leftover(pi.begin() + pos, pi.end());
    diag.sad = static_cast<int>(sad.size());
    std::sort(happy.begin(), happy.end());

    for (int i : sad) {
        for (int got = 0; got < target[i]; ++got) {
            bool from_leftover = ch.bit(i, "source", [&](const Valuation& v) { return ones_in(v, leftover) > 0; });
            if (from_leftover) {
                auto p = ch.choice(i, "take", leftover.size(), [&](const Valuation& v) {
                    return static_cast<std::uint64_t>(std::find_if(leftover.begin(), leftover.end(), [&](int e) { return one(v, e); }) -
                                                      leftover.begin());
                });
                held[i].push_back(leftover[p]);
                leftover.erase(leftover.begin() + static_cast<long>(p));
                continue;
            }
            std::vector<int> loose;
            for (int j : happy)
                if (static_cast<int>(held[j].size()) > target[j]) loose.push_back(j);
            if (loose.empty()) throw ProtocolFailure("binary3p: no non-tight donor remains");
            const int donor = loose[ch.choice(i, "donor", loose.size(), [&](const Valuation& v) {
                for (std::size_t p = 0; p < loose.size(); ++p)
                    if (ones_in(v, held[loose[p]]) >= target[i] + 1) return p;
                throw ProtocolFailure("binary3p: no donor holds enough of the agent's items");
            })];
            const std::vector<int> main = held[donor];
            auto keep = ch.subset(donor, "keep", static_cast<int>(main.size()), target[donor], [&](const Valuation& v) {
                std::vector<int> chosen;
                for (int p = 0; p < static_cast<int>(main.size()) && static_cast<int>(chosen.size()) < target[donor]; ++p)
                    if (one(v, main[p])) chosen.push_back(p);
                return chosen;
            });
            std::vector<char> kept(main.size(), 0);
            for (int p : keep) kept[p] = 1;
            held[donor].clear();
            std::vector<int> released;
            for (std::size_t p = 0; p < main.size(); ++p) (kept[p] ? held[donor] : released).push_back(main[p]);
            auto p = ch.choice(i, "take", released.size(), [&](const Valuation& v) {
                auto it = std::find_if(released.begin(), released.end(), [&](int e) { return one(v, e); });
                if (it == released.end()) throw ProtocolFailure("binary3p: donor released none of the agent's items");
                return static_cast<std::uint64_t>(it - released.begin());
            });
            held[i].push_back(released[p]);
            released.erase(released.begin() + static_cast<long>(p));
            leftover.insert(leftover.end(), released.begin(), released.end());
        }
    }
    for (int e : leftover) held[0].push_back(e);
    for (auto& bundle : held) bundle.erase(std::remove_if(bundle.begin(), bundle.end(), [&](int e) { return e >= m; }), bundle.end());
    std::sort(leftover.begin(), leftover.end());
    leftover.erase(std::lower_bound(leftover.begin(), leftover.end(), m), leftover.end());
    diag.leftover = leftover;
    out.allocation = Allocation::from_bundles(n, m, held);
    return out;
}

}  // namespace fairalloc::detail
