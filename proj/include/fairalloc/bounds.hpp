#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/channel.hpp"
#include "fairalloc/model.hpp"
#include "fairalloc/shares.hpp"

namespace fairalloc {

// Allocations such that every queried instance is served fairly by at least one of them.
struct HittingSetResult {
    std::vector<Allocation> allocations;
    int size = 0;
    bool exact = false;  // minimality proven by a completed search
    int description_bits = 0;  // ceil(log2 size)
    std::uint64_t nodes = 0;
};

struct HittingSetBudget {
    std::uint64_t max_allocations = 1u << 20;  // n^m must not exceed this
    std::uint64_t max_nodes = 5'000'000;
    ShareCaps caps;
    int threads = 0;
};

// Every allocation of the instances' common (n, m) is a candidate.
HittingSetResult min_hitting_set(const std::vector<Instance>& instances, Notion notion,
                                 const HittingSetBudget& budget = {});
// Restricts the search to the given candidates.
HittingSetResult min_hitting_set(const std::vector<Instance>& instances, Notion notion,
                                 const std::vector<Allocation>& candidates, const HittingSetBudget& budget = {});

// Every allocation of m items to n agents in base-n counting order.
std::vector<Allocation> all_allocations(int n, int m, std::uint64_t cap = 1u << 20);
// One allocation per agent-labelled bundle-size vector, items dealt out in index order.
// For item-exchangeable families the fair probability of an allocation depends only on
// its size vector, so this list attains the same maximum as all_allocations.
std::vector<Allocation> size_representatives(int n, int m);

struct RdcOptions {
    bool exhaustive = false;          // enumerate the family's whole support instead of sampling
    std::uint64_t trials = 1000;      // sampled instances; ignored when exhaustive
    FamilyParams params;
    std::vector<Allocation> candidates;  // empty: all allocations, or size representatives when symmetric
    bool symmetric = true;            // use size representatives when no candidates are given
    std::uint64_t max_allocations = 1u << 20;
    std::uint64_t max_instances = 5'000'000;
    double z = 1.959963984540054;     // 95% two-sided
    ShareCaps caps;
    int threads = 0;
};

struct RdcEstimate {
    Family family = Family::BinaryBalanced;
    Notion notion = Notion::MMS;
    int n = 0;
    int m = 0;
    std::uint64_t trials = 0;     // instances evaluated
    std::uint64_t successes = 0;  // of the best allocation
    double p_hat = 0;
    Rational p_exact{0};  // successes / trials
    double ci_low = 0;
    double ci_high = 0;
    double bound_bits = 0;
    bool lower_only = false;  // no allocation ever succeeded; bound_bits is log2(trials)
    bool exhaustive = false;
    Allocation best;
};

// Number of instances in the family's support when it has an exhaustive enumerator, else nullopt.
std::optional<std::uint64_t> support_size(Family family, int n, int m, const FamilyParams& params);
// The family's full support, each instance equally likely under the generator.
std::vector<Instance> enumerate_family(Family family, int n, int m, const FamilyParams& params,
                                       std::uint64_t cap = 5'000'000);

RdcEstimate estimate_rdc_bound(Family family, Notion notion, int n, int m, const Crs& crs,
                               const RdcOptions& opts = {});

struct WilsonInterval {
    double low = 0;
    double high = 0;
};
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

// Rotation j in [1, n]: agent i < n-1 receives item (i + 1 + j) mod (n + 1), the last agent the other two.
Allocation cyclic_allocation(int n, int rotation);

struct CyclicResult {
    int rotation = 0;
    Allocation allocation;
    int description_bits = 0;  // ceil(log2 n)
};

// Smallest rotation whose cyclic allocation gives every agent an MMS bundle.
// Requires unit-demand valuations and m = n + 1.
CyclicResult cyclic_mms_dc(const Instance& inst);

std::string rdc_csv_header();
std::string rdc_csv_row(const RdcEstimate& e);

}  // namespace fairalloc
