#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/channel.hpp"
#include "fairalloc/model.hpp"
#include "fairalloc/shares.hpp"

namespace fairalloc {

// Everything the referee may know before any agent speaks.
struct Public {
    int n = 0;
    int m = 0;
    Kind kind = Kind::Additive;
    Value scale = 1;
    Value a = 0;
    Value b = 0;
};

Public public_of(const Instance& inst);

// Consecutive blocks tiling [0, m) plus up to n hole items handed out separately.
struct SemiContiguous {
    std::vector<int> block_begin;  // per agent
    std::vector<int> block_end;    // per agent, half-open
    std::vector<int> hole;         // per agent, -1 when none

    int n() const { return static_cast<int>(hole.size()); }
    // Throws ProtocolFailure naming the first broken invariant.
    void validate(int m) const;
    Allocation flatten(int m) const;
};

struct EligibleSnapshot {
    int unsatisfied = 0;  // k
    int eligible = 0;     // bundles eligible for the agent whose turn it is
    int floor = 0;        // ceil(k^2 / (e^2 n))
};

// Observability only; nothing here feeds back into an allocation.
struct Diagnostics {
    int sad = -1;                    // agents entering the repair phase of binary3p
    std::vector<int> targets;        // per-agent target counts
    std::vector<int> prefix_start;   // per agent, -1 when no prefix was taken
    std::vector<int> prefix_length;
    std::vector<int> leftover;
    std::vector<int> holes;          // hole pool
    std::vector<int> non_holes;
    std::vector<int> eligible_ranks;  // rud
    std::vector<EligibleSnapshot> snapshots;
    int retries = 0;      // failed bundling attempts
    int bundles = 0;      // bundle count used by bundling protocols, 0 when none
    int queries = 0;      // identical-ud bipartition queries
};

struct Outcome {
    Allocation allocation;
    Transcript transcript;
    Diagnostics diag;
    std::optional<SemiContiguous> semi;
};

struct RunOptions {
    int bundle_count = 0;  // tps-bundle: override of the bundle count, 0 selects the default
    int max_attempts = 256;
};

using ProtocolFn = std::function<Outcome(const Public&, Channel&, const Crs&, const RunOptions&)>;

// Instance family and size window in which a protocol's guarantee applies.
struct SoundnessDomain {
    Family family = Family::AdditiveRandom;
    int n_min = 1, n_max = 1;
    int m_min = 1, m_max = 1;
    int m_per_n_min = 0, m_per_n_max = 0;  // when nonzero, m is drawn from [lo*n, hi*n]
    FamilyParams params;
};

struct ProtocolSpec {
    std::string id;
    std::string summary;
    Notion notion;
    ProtocolFn run;
    SoundnessDomain domain;
    RunOptions defaults;  // used for soundness trials
};

const std::vector<ProtocolSpec>& protocol_registry();
const ProtocolSpec& find_protocol(const std::string& id);

// Draws one instance of the protocol's soundness domain; n, m and values all derive from seed.
Instance sample_in_domain(const ProtocolSpec& spec, std::uint64_t seed);

// Checks the parts of a precondition that depend on private values.
void check_preconditions(const ProtocolSpec& spec, const Instance& inst);

Outcome run_protocol(const std::string& id, const Instance& inst, const Crs& crs, const RunOptions& opts = {});
Outcome run_protocol(const ProtocolSpec& spec, const Instance& inst, const Crs& crs, const RunOptions& opts);
// Rebuilds an outcome from public parameters and a recorded transcript alone.
Outcome replay_protocol(const std::string& id, const Public& pub, const Transcript& tape, const Crs& crs,
                        const RunOptions& opts = {});

// Agent-side building block: n contiguous bundles over items in index order, each
// strictly Prop1 for v. Returned as the n-1 cut positions (bundle j ends before cut j).
std::vector<int> prop1_cuts(const Valuation& v, int n);

// Default bundle count of tps-bundle.
long long default_bundle_count(int n);

}  // namespace fairalloc
