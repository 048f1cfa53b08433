#include "fairalloc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "parallel.hpp"

namespace fairalloc {
namespace {

using nlohmann::json;

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::vector<int> int_list(const json& j, const char* key) {
    std::vector<int> out;
    if (!j.contains(key)) return out;
    const json& v = j.at(key);
    if (v.is_array())
        for (const auto& x : v) out.push_back(x.get<int>());
    else
        out.push_back(v.get<int>());
    return out;
}

std::vector<SweepCell> expand_experiment(const json& e) {
    std::vector<std::string> protocols;
    if (e.contains("protocols"))
        for (const auto& p : e.at("protocols")) protocols.push_back(p.get<std::string>());
    if (e.contains("protocol")) protocols.push_back(e.at("protocol").get<std::string>());
    if (protocols.empty()) throw UsageError("experiment lists no protocol");

    SweepCell base;
    if (e.contains("family")) base.family = family_from_string(e.at("family").get<std::string>());
    if (e.contains("params")) {
        FamilyParams params;
        for (auto it = e.at("params").begin(); it != e.at("params").end(); ++it)
            params[it.key()] = it.value().get<std::int64_t>();
        base.params = params;
    }
    if (e.contains("trials")) base.trials = e.at("trials").get<std::uint64_t>();
    if (e.contains("bundle_count") || e.contains("max_attempts")) {
        RunOptions o;
        o.bundle_count = e.value("bundle_count", 0);
        o.max_attempts = e.value("max_attempts", 256);
        base.options = o;
    }

    std::vector<std::pair<int, int>> grid;
    if (e.contains("cells")) {
        for (const auto& c : e.at("cells")) {
            if (!c.is_array() || c.size() != 2) throw UsageError("each cell must be an [n, m] pair");
            grid.emplace_back(c[0].get<int>(), c[1].get<int>());
        }
    } else {
        auto ns = int_list(e, "n"), ms = int_list(e, "m"), per = int_list(e, "m_per_n");
        if (!ms.empty() && !per.empty()) throw UsageError("experiment gives both m and m_per_n");
        for (int n : ns) {
            for (int m : ms) grid.emplace_back(n, m);
            for (int r : per) grid.emplace_back(n, r * n);
        }
    }

    std::vector<SweepCell> cells;
    for (const auto& p : protocols) {
        find_protocol(p);
        for (auto [n, m] : grid) {
            SweepCell c = base;
            c.protocol = p;
            c.n = n;
            c.m = m;
            cells.push_back(std::move(c));
        }
    }
    return cells;
}

TrialRecord run_trial(const ProtocolSpec& spec, Family family, const FamilyParams& params, const RunOptions& opts,
                      int n, int m, std::uint64_t master, std::uint64_t trial) {
    TrialRecord r;
    r.trial = trial;
    r.instance_seed = trial_instance_seed(master, family, n, m, trial);
    r.crs_seed = trial_crs_seed(master, spec.id, trial);
    const Instance inst = gen_instance(family, n, m, params, r.instance_seed);
    check_preconditions(spec, inst);
    try {
        Outcome out = run_protocol(spec, inst, Crs(r.crs_seed), opts);
        r.integer_bits = out.transcript.integer_bits();
        r.idealized_bits = out.transcript.idealized_bits();
        r.ell = out.diag.sad;
        r.retries = out.diag.retries;
        auto verdicts = check_notion(inst, out.allocation, spec.notion);
        r.pass = all_pass(verdicts);
        if (!r.pass) r.failure = verdicts_to_text(verdicts);
    } catch (const ProtocolFailure& e) {
        r.pass = false;
        r.failure = std::string("protocol failure: ") + e.what();
    }
    return r;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(ParseErrorKind::Malformed, std::string("sweep config: ") + e.what());
    }
    SweepConfig cfg;
    try {
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.trials = j.value("trials", std::uint64_t{100});
        cfg.threads = j.value("threads", 0);
        if (j.contains("experiments"))
            for (const auto& e : j.at("experiments")) {
                auto cells = expand_experiment(e);
                cfg.cells.insert(cfg.cells.end(), cells.begin(), cells.end());
            }
    } catch (const json::exception& e) {
        throw ParseError(ParseErrorKind::Malformed, std::string("sweep config: ") + e.what());
    }
    if (cfg.trials == 0) throw UsageError("sweep config needs trials >= 1");
    return cfg;
}

std::uint64_t trial_instance_seed(std::uint64_t master, Family family, int n, int m, std::uint64_t trial) {
    const std::string label = "instance/" + to_string(family) + "/" + std::to_string(n) + "/" + std::to_string(m);
    return derive_seed(master, label, trial);
}

std::uint64_t trial_crs_seed(std::uint64_t master, const std::string& protocol, std::uint64_t trial) {
    return derive_seed(master, protocol, trial);
}

void summarize(ExperimentRow& row) {
    row.trials = row.records.size();
    row.mean_integer_bits = row.mean_idealized_bits = row.mean_bits_per_agent = row.mean_retries = 0;
    row.max_bits = 0;
    row.fairness_pass_rate = 0;
    row.mean_ell.reset();
    if (row.records.empty()) return;
    double bits = 0, ideal = 0, retries = 0, ell = 0;
    std::uint64_t passed = 0, ell_count = 0;
    for (const auto& r : row.records) {
        bits += static_cast<double>(r.integer_bits);
        ideal += r.idealized_bits;
        retries += r.retries;
        passed += r.pass;
        row.max_bits = std::max(row.max_bits, r.integer_bits);
        if (r.ell >= 0) ell += r.ell, ++ell_count;
    }
    const double t = static_cast<double>(row.records.size());
    row.mean_integer_bits = bits / t;
    row.mean_idealized_bits = ideal / t;
    row.mean_bits_per_agent = row.n > 0 ? row.mean_integer_bits / row.n : 0;
    row.mean_retries = retries / t;
    row.fairness_pass_rate = static_cast<double>(passed) / t;
    if (ell_count > 0) row.mean_ell = ell / static_cast<double>(ell_count);
}

ExperimentRow run_cell(const SweepCell& cell, std::uint64_t master_seed, std::uint64_t default_trials, int threads) {
    const ProtocolSpec& spec = find_protocol(cell.protocol);
    const Family family = cell.family.value_or(spec.domain.family);
    const FamilyParams params = cell.params.value_or(cell.family ? FamilyParams{} : spec.domain.params);
    const RunOptions opts = cell.options.value_or(spec.defaults);
    const std::uint64_t trials = cell.trials > 0 ? cell.trials : default_trials;
    if (trials == 0) throw UsageError("a sweep cell needs trials >= 1");

    ExperimentRow row;
    row.protocol = spec.id;
    row.family = family;
    row.n = cell.n;
    row.m = cell.m;
    row.records.resize(trials);
    const auto start = std::chrono::steady_clock::now();
    detail::parallel_for(trials, threads, [&](int, std::size_t t) {
        row.records[t] = run_trial(spec, family, params, opts, cell.n, cell.m, master_seed, t);
    });
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summarize(row);
    for (const auto& r : row.records)
        if (!r.pass) {
            Reproducer rep;
            rep.protocol = spec.id;
            rep.trial = r.trial;
            rep.instance_seed = r.instance_seed;
            rep.crs_seed = r.crs_seed;
            rep.instance_text = serialize_instance(gen_instance(family, cell.n, cell.m, params, r.instance_seed));
            rep.reason = r.failure;
            row.failure = std::move(rep);
            break;
        }
    return row;
}

std::vector<ExperimentRow> run_sweep(const SweepConfig& config) {
    std::vector<ExperimentRow> rows;
    for (const auto& cell : config.cells) rows.push_back(run_cell(cell, config.seed, config.trials, config.threads));
    return rows;
}

std::string csv_header(bool with_wall_time) {
    std::string h =
        "protocol,family,n,m,trials,mean_integer_bits,mean_idealized_bits,mean_bits_per_agent,max_bits,"
        "fairness_pass_rate,mean_ell,mean_retries";
    return with_wall_time ? h + ",wall_time" : h;
}

std::string to_csv(const std::vector<ExperimentRow>& rows, bool with_wall_time) {
    std::ostringstream os;
    os << csv_header(with_wall_time) << "\n";
    for (const auto& r : rows) {
        os << r.protocol << ',' << to_string(r.family) << ',' << r.n << ',' << r.m << ',' << r.trials << ','
           << fixed6(r.mean_integer_bits) << ',' << fixed6(r.mean_idealized_bits) << ','
           << fixed6(r.mean_bits_per_agent) << ',' << r.max_bits << ',' << fixed6(r.fairness_pass_rate) << ','
           << (r.mean_ell ? fixed6(*r.mean_ell) : "NA") << ',' << fixed6(r.mean_retries);
        if (with_wall_time) os << ',' << fixed6(r.wall_time);
        os << "\n";
    }
    return os.str();
}

std::string to_plotdata(const std::vector<ExperimentRow>& rows) {
    std::ostringstream os;
    std::string current;
    for (const auto& r : rows) {
        const std::string key = r.protocol + " " + to_string(r.family);
        if (key != current) {
            if (!current.empty()) os << "\n\n";
            current = key;
            os << "# protocol=" << r.protocol << " family=" << to_string(r.family) << "\n";
            os << "# n m trials mean_integer_bits mean_idealized_bits mean_bits_per_agent max_bits "
                  "fairness_pass_rate mean_ell mean_retries\n";
        }
        os << r.n << ' ' << r.m << ' ' << r.trials << ' ' << fixed6(r.mean_integer_bits) << ' '
           << fixed6(r.mean_idealized_bits) << ' ' << fixed6(r.mean_bits_per_agent) << ' ' << r.max_bits << ' '
           << fixed6(r.fairness_pass_rate) << ' ' << (r.mean_ell ? fixed6(*r.mean_ell) : "NaN") << ' '
           << fixed6(r.mean_retries) << "\n";
    }
    return os.str();
}

std::string trials_csv(const ExperimentRow& row) {
    std::ostringstream os;
    os << "trial,instance_seed,crs_seed,integer_bits,idealized_bits,pass,ell,retries\n";
    for (const auto& r : row.records)
        os << r.trial << ',' << r.instance_seed << ',' << r.crs_seed << ',' << r.integer_bits << ','
           << fixed6(r.idealized_bits) << ',' << (r.pass ? 1 : 0) << ',' << r.ell << ',' << r.retries << "\n";
    return os.str();
}

std::string reproducer_text(const Reproducer& r) {
    std::ostringstream os;
    os << "protocol " << r.protocol << " failed on trial " << r.trial << "\n"
       << "instance seed " << r.instance_seed << ", crs seed " << r.crs_seed << "\n"
       << "reason: " << r.reason << "\n"
       << r.instance_text;
    return os.str();
}

}  // namespace fairalloc
