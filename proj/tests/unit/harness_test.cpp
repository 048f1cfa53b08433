#include "doctest.h"
#include "fairalloc/harness.hpp"

using namespace fairalloc;

namespace {

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("empty grid yields no rows") {
    SweepConfig cfg = parse_sweep_config(R"({"seed": 3, "experiments": []})");
    auto rows = run_sweep(cfg);
    CHECK(rows.empty());
    CHECK(to_csv(rows) == csv_header() + "\n");
    CHECK(to_plotdata(rows).empty());
}

TEST_CASE("csv header is stable") {
    CHECK(csv_header() ==
          "protocol,family,n,m,trials,mean_integer_bits,mean_idealized_bits,mean_bits_per_agent,max_bits,"
          "fairness_pass_rate,mean_ell,mean_retries");
    CHECK(csv_header(true) == csv_header() + ",wall_time");
}

TEST_CASE("config expansion") {
    SweepConfig cfg = parse_sweep_config(R"({
        "seed": 9, "trials": 7,
        "experiments": [
            {"protocols": ["prop1-det", "round-robin"], "n": [2, 3], "m_per_n": [2, 4]},
            {"protocol": "binary3p", "family": "ef1_hard", "params": {"k": 4}, "cells": [[2, 8]], "trials": 3},
            {"protocol": "tps-bundle", "n": 2, "m": 40, "bundle_count": 4, "max_attempts": 2}
        ]})");
    CHECK(cfg.seed == 9);
    CHECK(cfg.trials == 7);
    REQUIRE(cfg.cells.size() == 10);
    CHECK(cfg.cells[0].protocol == "prop1-det");
    CHECK(cfg.cells[1].m == 8);
    CHECK(cfg.cells[3].n == 3);
    CHECK(cfg.cells[3].m == 12);
    CHECK(cfg.cells[8].family == Family::Ef1Hard);
    CHECK(cfg.cells[8].params->at("k") == 4);
    CHECK(cfg.cells[8].trials == 3);
    REQUIRE(cfg.cells[9].options);
    CHECK(cfg.cells[9].options->bundle_count == 4);
    CHECK(cfg.cells[9].options->max_attempts == 2);
}

TEST_CASE("config errors") {
    auto kind_of = [](const std::string& text) {
        try {
            parse_sweep_config(text);
        } catch (const ParseError& e) {
            return static_cast<int>(e.kind);
        } catch (const UsageError&) {
            return 100;
        }
        return -1;
    };
    CHECK(kind_of("{not json") == static_cast<int>(ParseErrorKind::Malformed));
    CHECK(kind_of(R"({"experiments": [{"protocol": "prop1-det", "n": "two", "m": 4}]})") ==
          static_cast<int>(ParseErrorKind::Malformed));
    CHECK(kind_of(R"({"experiments": [{"protocol": "nope", "n": 2, "m": 4}]})") == 100);
    CHECK(kind_of(R"({"experiments": [{"protocol": "rud", "n": 2, "m": 4, "m_per_n": 2}]})") == 100);
    CHECK(kind_of(R"({"trials": 0})") == 100);
    CHECK(kind_of(R"({"experiments": [{"protocol": "rud", "cells": [[2]]}]})") == 100);
}

TEST_CASE("sweeps are byte-identical for a fixed master seed") {
    const std::string text = R"({"seed": 11, "trials": 20, "experiments": [
        {"protocols": ["prop1-rand", "binary3p", "rud"], "n": [4], "m_per_n": [2, 4]}]})";
    auto a = run_sweep(parse_sweep_config(text));
    auto b = run_sweep(parse_sweep_config(text));
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_plotdata(a) == to_plotdata(b));
    CHECK(lines(to_csv(a)) == 7);
    for (const auto& r : a) CHECK(r.fairness_pass_rate == 1.0);
    CHECK(a[2].mean_ell.has_value());
    CHECK_FALSE(a[0].mean_ell.has_value());
    CHECK(to_csv(a).find(",NA,") != std::string::npos);
    auto c = run_sweep(parse_sweep_config(R"({"seed": 12, "trials": 20, "experiments": [
        {"protocols": ["prop1-rand"], "n": [4], "m_per_n": [2]}]})"));
    CHECK(to_csv(c) != to_csv({a[0]}));
}

TEST_CASE("protocols in one cell family see the same instances") {
    CHECK(trial_instance_seed(1, Family::AdditiveRandom, 4, 8, 3) == trial_instance_seed(1, Family::AdditiveRandom, 4, 8, 3));
    CHECK(trial_instance_seed(1, Family::AdditiveRandom, 4, 8, 3) != trial_instance_seed(1, Family::AdditiveRandom, 4, 8, 4));
    CHECK(trial_crs_seed(1, "rud", 0) != trial_crs_seed(1, "binary3p", 0));
    SweepCell p{"prop1-det", Family::AdditiveRandom, std::nullopt, 3, 9, 5, std::nullopt};
    SweepCell r{"round-robin", Family::AdditiveRandom, std::nullopt, 3, 9, 5, std::nullopt};
    auto rp = run_cell(p, 4), rr = run_cell(r, 4);
    for (int t = 0; t < 5; ++t) CHECK(rp.records[t].instance_seed == rr.records[t].instance_seed);
}

TEST_CASE("plotdata blocks per protocol and family") {
    auto rows = run_sweep(parse_sweep_config(R"({"trials": 3, "experiments": [
        {"protocols": ["round-robin", "prop1-det"], "n": [2], "m": [4, 6]}]})"));
    const std::string plot = to_plotdata(rows);
    CHECK(plot.find("# protocol=round-robin family=additive_random\n") == 0);
    CHECK(plot.find("\n\n\n# protocol=prop1-det") != std::string::npos);
    CHECK(plot.find("NaN") != std::string::npos);
}

TEST_CASE("failing trials produce a reproducer for the lowest failing trial") {
    SweepCell cell;
    cell.protocol = "tps-bundle";
    cell.n = 2;
    cell.m = 40;
    cell.trials = 40;
    cell.options = RunOptions{2, 1};
    ExperimentRow row = run_cell(cell, 5);
    REQUIRE(row.failure);
    CHECK(row.fairness_pass_rate < 1.0);
    CHECK(row.trials == 40);
    std::uint64_t lowest = 0;
    while (row.records[lowest].pass) ++lowest;
    CHECK(row.failure->trial == lowest);
    CHECK(row.failure->reason.find("protocol failure") != std::string::npos);
    Instance again = parse_instance(row.failure->instance_text);
    CHECK(serialize_instance(again) ==
          serialize_instance(gen_instance(Family::AdditiveRandom, 2, 40, {}, row.failure->instance_seed)));
    CHECK(reproducer_text(*row.failure).find("tps-bundle") != std::string::npos);
    CHECK(lines(trials_csv(row)) == 41);
}

TEST_CASE("deterministic Prop1 stays within its hard budget in a sweep") {
    SweepCell cell{"prop1-det", Family::AdditiveRandom, std::nullopt, 8, 64, 100, std::nullopt};
    ExperimentRow row = run_cell(cell, 1);
    CHECK(row.max_bits <= 144);
    CHECK(row.fairness_pass_rate == 1.0);
    CHECK(row.mean_bits_per_agent == doctest::Approx(row.mean_integer_bits / 8));
}

TEST_CASE("summarize recomputes aggregates from records") {
    ExperimentRow row;
    row.n = 2;
    row.records = {{0, 1, 2, 10, 9.5, true, 1, 0, ""}, {1, 3, 4, 20, 19.0, false, -1, 2, "x"}};
    summarize(row);
    CHECK(row.trials == 2);
    CHECK(row.mean_integer_bits == 15.0);
    CHECK(row.mean_bits_per_agent == 7.5);
    CHECK(row.max_bits == 20);
    CHECK(row.fairness_pass_rate == 0.5);
    CHECK(*row.mean_ell == 1.0);
    CHECK(row.mean_retries == 1.0);
}
