#include <algorithm>
#include <cmath>

#include "fairalloc/channel.hpp"
#include "fairalloc/model.hpp"

namespace fairalloc {
namespace {

struct FamilyName {
    Family f;
    const char* name;
};
constexpr FamilyName kFamilies[] = {
    {Family::UdRandom, "ud_random"},
    {Family::UdIdentical, "ud_identical"},
    {Family::BinaryBalanced, "binary_balanced"},
    {Family::BinaryRandom, "binary_random"},
    {Family::TwoValuedRandom, "two_valued_random"},
    {Family::TwoValuedHard, "two_valued_hard"},
    {Family::IdenticalAdditiveHard, "identical_additive_hard"},
    {Family::Ef1Hard, "ef1_hard"},
    {Family::AdditiveRandom, "additive_random"},
};

std::int64_t param(const FamilyParams& p, const std::string& key, std::int64_t fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

[[noreturn]] void infeasible(const std::string& what) { throw InfeasibleError(what); }

std::vector<Value> random_subset_row(Stream& rng, int m, int ones, Value one) {
    std::vector<Value> row(m, 0);
    auto perm = rng.permutation(m);
    for (int j = 0; j < ones; ++j) row[perm[j]] = one;
    return row;
}

int count_equal(const std::vector<Value>& row, Value x) {
    return static_cast<int>(std::count(row.begin(), row.end(), x));
}

}  // namespace

std::string to_string(Family f) {
    for (const auto& fn : kFamilies)
        if (fn.f == f) return fn.name;
    return "?";
}

Family family_from_string(const std::string& s) {
    for (const auto& fn : kFamilies)
        if (s == fn.name) return fn.f;
    throw UsageError("unknown family '" + s + "'");
}

Instance gen_instance(Family family, int n, int m, const FamilyParams& params, std::uint64_t seed) {
    if (n < 1) infeasible("n must be at least 1");
    if (m < 1) infeasible("m must be at least 1");
    Stream rng(derive_seed(seed, to_string(family)));
    std::vector<std::vector<Value>> rows;
    Instance inst;
    switch (family) {
        case Family::UdRandom:
        case Family::UdIdentical: {
            std::vector<Value> shared;
            for (int i = 0; i < n; ++i) {
                if (family == Family::UdIdentical && i > 0) {
                    rows.push_back(shared);
                    continue;
                }
                auto perm = rng.permutation(m);
                std::vector<Value> row(m);
                for (int e = 0; e < m; ++e) row[e] = perm[e] + 1;
                shared = row;
                rows.push_back(row);
            }
            inst = make_instance(Kind::UnitDemand, rows);
            break;
        }
        case Family::BinaryBalanced: {
            std::int64_t k = param(params, "k", m / (2 * n));
            if (k < 1 || m < 2 * k * n)
                infeasible("binary_balanced needs k >= 1 and m >= 2kn (k=" + std::to_string(k) + ")");
            auto row = random_subset_row(rng, m, static_cast<int>(k * n), 1);
            rows.assign(n, row);
            inst = make_instance(Kind::BinaryAdditive, rows);
            if (count_equal(inst.agents[0].values, 1) != k * n) throw ProtocolFailure("balanced invariant broken");
            break;
        }
        case Family::BinaryRandom: {
            std::int64_t num = param(params, "p_num", 1), den = param(params, "p_den", 2);
            if (den <= 0 || num < 0 || num > den) infeasible("binary_random needs 0 <= p_num <= p_den");
            for (int i = 0; i < n; ++i) {
                std::vector<Value> row(m);
                for (auto& x : row) x = rng.bernoulli(num, den) ? 1 : 0;
                rows.push_back(row);
            }
            inst = make_instance(Kind::BinaryAdditive, rows);
            break;
        }
        case Family::TwoValuedRandom: {
            std::int64_t a = param(params, "a", 3), b = param(params, "b", 1);
            if (!(a > b && b >= 0)) infeasible("two_valued_random needs a > b >= 0");
            for (int i = 0; i < n; ++i) {
                std::vector<Value> row(m);
                for (auto& x : row) x = rng.coin() ? a : b;
                rows.push_back(row);
            }
            inst = make_instance(Kind::TwoValued, rows, 1, a, b);
            break;
        }
        case Family::TwoValuedHard: {
            std::int64_t k = param(params, "k", (m - 1) / (2 * n));
            if (k < 1 || !(2 * k * n < m && m <= 2 * k * n + 2 * n))
                infeasible("two_valued_hard needs k >= 1 and 2kn < m <= 2kn+2n (k=" + std::to_string(k) + ")");
            std::int64_t large = k * n + n - 1;
            Value scale = m - large;
            auto row = random_subset_row(rng, m, static_cast<int>(large), scale);
            for (auto& x : row)
                if (x == 0) x = 1;
            rows.assign(n, row);
            inst = make_instance(Kind::TwoValued, rows, scale, scale, 1);
            if (count_equal(row, scale) != large) throw ProtocolFailure("two-valued hard invariant broken");
            break;
        }
        case Family::IdenticalAdditiveHard: {
            std::int64_t k = param(params, "k", m / n);
            std::int64_t big = param(params, "K", static_cast<std::int64_t>(m) * m);
            if (k < 1 || k * n > m) infeasible("identical_additive_hard needs 1 <= k and kn <= m");
            if (big < static_cast<std::int64_t>(m) * m) infeasible("identical_additive_hard needs K >= m^2");
            std::vector<Value> row;
            for (int j = 1; j <= n; ++j) {
                for (int c = 0; c < k - 1; ++c) row.push_back(big - j);
                row.push_back(big * big + (k - 1) * j);
            }
            row.resize(m, 0);
            rng.shuffle(row);
            rows.assign(n, row);
            inst = make_instance(Kind::Additive, rows);
            break;
        }
        case Family::Ef1Hard: {
            auto fallback = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(m), 0.75)));
            std::int64_t k = param(params, "k", fallback);
            if (k < 1 || k > m) infeasible("ef1_hard needs 1 <= k <= m");
            for (int i = 0; i < n; ++i) rows.push_back(random_subset_row(rng, m, static_cast<int>(k), 1));
            inst = make_instance(Kind::BinaryAdditive, rows);
            for (const auto& v : inst.agents)
                if (count_equal(v.values, 1) != k) throw ProtocolFailure("ef1_hard invariant broken");
            break;
        }
        case Family::AdditiveRandom: {
            std::int64_t lo = param(params, "min", 0), hi = param(params, "max", 100);
            if (lo < 0 || hi < lo) infeasible("additive_random needs 0 <= min <= max");
            for (int i = 0; i < n; ++i) {
                std::vector<Value> row(m);
                for (auto& x : row) x = rng.between(lo, hi);
                rows.push_back(row);
            }
            inst = make_instance(Kind::Additive, rows);
            break;
        }
    }
    inst.validate();
    return inst;
}

}  // namespace fairalloc
