#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/model.hpp"
#include "fairalloc/protocols.hpp"

namespace fairalloc {

// One (protocol, family, n, m) grid point.
struct SweepCell {
    std::string protocol;
    std::optional<Family> family;  // defaults to the protocol's soundness family
    std::optional<FamilyParams> params;
    int n = 0;
    int m = 0;
    std::uint64_t trials = 0;  // 0 inherits the config's trial count
    std::optional<RunOptions> options;
};

struct SweepConfig {
    std::uint64_t seed = 1;
    std::uint64_t trials = 100;
    int threads = 0;  // 0 uses every hardware thread
    std::vector<SweepCell> cells;
};

// JSON: {"seed", "trials", "threads", "experiments": [{"protocol" | "protocols", "family", "params",
// "n", "m" | "m_per_n" | "cells", "trials", "bundle_count", "max_attempts"}]}.
SweepConfig parse_sweep_config(const std::string& json_text);

struct TrialRecord {
    std::uint64_t trial = 0;
    std::uint64_t instance_seed = 0;
    std::uint64_t crs_seed = 0;
    std::uint64_t integer_bits = 0;
    double idealized_bits = 0;
    bool pass = false;
    int ell = -1;  // agents entering binary3p's repair phase, -1 when not reported
    int retries = 0;
    std::string failure;  // checker witness or protocol error
};

// Everything needed to rerun one failing trial by hand.
struct Reproducer {
    std::string protocol;
    std::uint64_t trial = 0;
    std::uint64_t instance_seed = 0;
    std::uint64_t crs_seed = 0;
    std::string instance_text;
    std::string reason;
};

struct ExperimentRow {
    std::string protocol;
    Family family = Family::AdditiveRandom;
    int n = 0;
    int m = 0;
    std::uint64_t trials = 0;
    double mean_integer_bits = 0;
    double mean_idealized_bits = 0;
    double mean_bits_per_agent = 0;
    std::uint64_t max_bits = 0;
    double fairness_pass_rate = 0;
    std::optional<double> mean_ell;
    double mean_retries = 0;
    double wall_time = 0;  // seconds
    std::vector<TrialRecord> records;
    std::optional<Reproducer> failure;  // lowest failing trial
};

// Per-trial seeds. The instance stream ignores the protocol so protocols are compared on equal inputs.
std::uint64_t trial_instance_seed(std::uint64_t master, Family family, int n, int m, std::uint64_t trial);
std::uint64_t trial_crs_seed(std::uint64_t master, const std::string& protocol, std::uint64_t trial);

// Runs every trial of a cell and checks each allocation with the protocol's declared notion.
ExperimentRow run_cell(const SweepCell& cell, std::uint64_t master_seed, std::uint64_t default_trials = 100,
                       int threads = 0);
std::vector<ExperimentRow> run_sweep(const SweepConfig& config);

// Aggregates recomputed from the stored trial records.
void summarize(ExperimentRow& row);

std::string csv_header(bool with_wall_time = false);
std::string to_csv(const std::vector<ExperimentRow>& rows, bool with_wall_time = false);
// Whitespace columns, one block per (protocol, family), blocks separated by two blank lines.
std::string to_plotdata(const std::vector<ExperimentRow>& rows);
std::string trials_csv(const ExperimentRow& row);
std::string reproducer_text(const Reproducer& r);

}  // namespace fairalloc
