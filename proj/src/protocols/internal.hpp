#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fairalloc/protocols.hpp"

namespace fairalloc::detail {

void require(bool ok, const std::string& what);
void require_n(const Public& pub, int lo, int hi, const char* id);
void require_kind(const Public& pub, bool ok, const char* id, const char* need);

int ceil_log2(std::uint64_t x);
std::vector<int> all_items(int m);

// Indicator of the agent's n top items: the distinguished set of her binary image.
std::vector<char> distinguished(const Valuation& v, int n);

// Agent-side truncated view in raw units: w[e] <= T and sum(w) = n T.
struct Scaled {
    std::vector<Value> w;
    Value t_num = 0;  // T = t_num / t_den
    Value t_den = 1;
    int n = 1;

    bool zero() const { return t_num == 0; }
    // x >= (num/den) * T
    bool at_least(__int128 x, Value num, Value den) const {
        return x * t_den * den >= static_cast<__int128>(num) * t_num;
    }
    bool at_least_rho(__int128 x) const { return at_least(x, n, 2 * n - 1); }
    bool above_one(__int128 x) const { return x * t_den > t_num; }
    bool at_most(__int128 x, Value num, Value den) const {
        return x * t_den * den <= static_cast<__int128>(num) * t_num;
    }
};
Scaled scaled_view(const Valuation& v, int n);

// Leaf of a median decomposition: sequence range [lo, hi) and the bundle index it serves.
struct Leaf {
    int lo = 0;
    int hi = 0;
    int bundle = -1;  // -1 when the agent took no part
};

// Agent's cut cut_index over the sequence: number of sequence items in her bundles
// 0..cut_index-1. Must be non-decreasing in cut_index.
using CutFn = std::function<int(int agent, const Valuation& v, int cut_index)>;

// Splits [0, length) among agents by repeated median cuts. Randomized mode finds each
// median by quickselect with pivots ordered by a CRS permutation of agents.
std::vector<Leaf> median_decompose(Channel& ch, const Crs& crs, int n_total, const std::vector<int>& agents, int length,
                                   int min_cut, const CutFn& cut, bool randomized, const std::string& tag);

// seq lists the non-hole items in index order; leaves index into seq.
SemiContiguous build_semi(int n, int m, const std::vector<int>& seq, const std::vector<Leaf>& leaves,
                          const std::vector<int>& hole);

// The two-phase rho-TPS engine over "units" (single items or bundles of items). An
// agent's unit value comes from value_of_unit. tau_of gives the threshold (num/den of
// T) used for grabbing and for greedy bundles.
struct TpsRun {
    std::vector<int> grabbed;  // per agent, unit index or -1
    std::vector<Leaf> leaves;  // per agent over the remaining-units sequence
    std::vector<int> remaining;
};
using UnitValues = std::function<std::vector<Value>(int agent, const Valuation& v, Scaled& s)>;
TpsRun tps_engine(Channel& ch, const Crs& crs, int n, int units, const UnitValues& unit_values, bool randomized,
                  const std::string& tag);

Outcome ud2(const Public& pub, Channel& ch, const Crs& crs, const std::string& variant);
Outcome identical_ud(const Public& pub, Channel& ch, const Crs& crs);
Outcome ud_det(const Public& pub, Channel& ch, const Crs& crs);
Outcome rud(const Public& pub, Channel& ch, const Crs& crs);
Outcome ud_ef1(const Public& pub, Channel& ch, const Crs& crs, bool bundled, const RunOptions& opts);
Outcome binary3p(const Public& pub, Channel& ch, const Crs& crs);
Outcome two_valued(const Public& pub, Channel& ch, const Crs& crs);
Outcome prop1(const Public& pub, Channel& ch, const Crs& crs, bool randomized);
Outcome tps2p(const Public& pub, Channel& ch, const Crs& crs);
Outcome aprop(const Public& pub, Channel& ch, const Crs& crs, bool randomized);
Outcome tps_bundle(const Public& pub, Channel& ch, const Crs& crs, const RunOptions& opts);
Outcome cut_choose(const Public& pub, Channel& ch, const Crs& crs);
Outcome round_robin(const Public& pub, Channel& ch, const Crs& crs);

}  // namespace fairalloc::detail
