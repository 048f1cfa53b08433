#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairalloc/fairalloc.h"

namespace {

constexpr int kFairnessFailure = 1;
constexpr int kError = 2;

struct CliError {
    int code;
    std::string message;
};

void check(fa_status s, const char* what) {
    if (s != FA_OK) throw CliError{kError, std::string(what) + ": " + fa_status_name(s) + ": " + fa_last_error()};
}

// Owns a char* returned by the library.
struct Text {
    char* p = nullptr;
    ~Text() { fa_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    ~Handle() { Free(p); }
};
using InstanceH = Handle<fa_instance, fa_instance_free>;
using AllocationH = Handle<fa_allocation, fa_allocation_free>;
using OutcomeH = Handle<fa_outcome, fa_outcome_free>;
using SweepH = Handle<fa_sweep, fa_sweep_free>;
using HitsetH = Handle<fa_hitset, fa_hitset_free>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kError, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) throw CliError{kError, "cannot write " + out};
}

struct InstanceSource {
    std::string path;
    std::string family;
    int n = 0;
    int m = 0;
    std::string params;
    std::uint64_t seed = 1;

    void add(CLI::App* app, bool with_seed = true) {
        app->add_option("--instance,-i", path, "instance file");
        app->add_option("--family", family, "generate the instance from this family instead");
        app->add_option("--n", n, "agents");
        app->add_option("--m", m, "items");
        app->add_option("--params", params, "family parameters, e.g. k=2,max=50");
        if (with_seed) app->add_option("--seed", seed, "seed for the generator and the shared random string");
    }

    InstanceH load() const {
        InstanceH h;
        if (!path.empty()) {
            check(fa_instance_parse(read_file(path).c_str(), &h.p), "parse instance");
        } else if (!family.empty()) {
            check(fa_instance_generate(family.c_str(), n, m, params.empty() ? nullptr : params.c_str(), seed, &h.p),
                  "generate instance");
        } else {
            throw CliError{kError, "give --instance or --family with --n and --m"};
        }
        return h;
    }
};

std::string notion_of(const std::string& protocol) {
    size_t index = 0;
    check(fa_protocol_lookup(protocol.c_str(), &index), "protocol");
    return fa_protocol_notion(index);
}

int cmd_protocols() {
    for (size_t i = 0; i < fa_protocol_count(); ++i)
        std::cout << fa_protocol_id(i) << '\t' << fa_protocol_notion(i) << '\t' << fa_protocol_summary(i) << '\n';
    return 0;
}

int cmd_gen(const InstanceSource& src, const std::string& out) {
    if (src.family.empty()) throw CliError{kError, "gen needs --family"};
    InstanceH inst = src.load();
    Text text;
    check(fa_instance_serialize(inst.p, &text.p), "serialize instance");
    emit(text.str(), out);
    return 0;
}

int cmd_run(const InstanceSource& src, const std::string& protocol, int bundle_count, const std::string& out,
            const std::string& transcript_out) {
    InstanceH inst = src.load();
    OutcomeH outcome;
    check(fa_run(protocol.c_str(), inst.p, src.seed, bundle_count, &outcome.p), "run");
    AllocationH alloc;
    check(fa_outcome_allocation(outcome.p, &alloc.p), "allocation");
    Text alloc_text, transcript, diag, report;
    check(fa_allocation_serialize(alloc.p, &alloc_text.p), "serialize allocation");
    check(fa_outcome_transcript(outcome.p, &transcript.p), "transcript");
    check(fa_outcome_diagnostics(outcome.p, &diag.p), "diagnostics");
    int pass = 0;
    const std::string notion = notion_of(protocol);
    check(fa_check(inst.p, alloc.p, notion.c_str(), &pass, &report.p), "check");

    if (!out.empty()) emit(alloc_text.str(), out);
    if (!transcript_out.empty()) emit(transcript.str(), transcript_out);
    std::cout << alloc_text.str();
    std::cout << "bits " << fa_outcome_integer_bits(outcome.p) << " idealized " << fa_outcome_idealized_bits(outcome.p)
              << "\n";
    std::cout << "transcript\n" << transcript.str();
    std::cout << "diagnostics " << diag.str() << "\n";
    std::cout << "verdicts (" << notion << ")\n" << report.str();
    return pass ? 0 : kFairnessFailure;
}

int cmd_replay(const InstanceSource& src, const std::string& protocol, int bundle_count,
               const std::string& transcript_path, const std::string& out) {
    InstanceH inst = src.load();
    AllocationH alloc;
    check(fa_replay(protocol.c_str(), inst.p, read_file(transcript_path).c_str(), src.seed, bundle_count, &alloc.p),
          "replay");
    Text text;
    check(fa_allocation_serialize(alloc.p, &text.p), "serialize allocation");
    emit(text.str(), out);
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& out, const std::string& format, bool wall_time) {
    SweepH sweep;
    check(fa_sweep_run(read_file(config).c_str(), &sweep.p), "sweep");
    Text text;
    if (format == "plotdata")
        check(fa_sweep_plotdata(sweep.p, &text.p), "plotdata");
    else
        check(fa_sweep_csv(sweep.p, wall_time ? 1 : 0, &text.p), "csv");
    emit(text.str(), out);
    if (fa_sweep_failure_count(sweep.p) > 0) {
        Text repro;
        check(fa_sweep_reproducers(sweep.p, &repro.p), "reproducers");
        std::cerr << repro.str();
        return kFairnessFailure;
    }
    return 0;
}

int cmd_check(const InstanceSource& src, const std::string& allocation_path, const std::string& notion) {
    InstanceH inst = src.load();
    AllocationH alloc;
    check(fa_allocation_parse(read_file(allocation_path).c_str(), &alloc.p), "parse allocation");
    int pass = 0;
    Text report;
    check(fa_check(inst.p, alloc.p, notion.c_str(), &pass, &report.p), "check");
    std::cout << report.str();
    return pass ? 0 : kFairnessFailure;
}

int cmd_bounds(const InstanceSource& src, const std::string& notion, std::uint64_t trials, bool exhaustive,
               const std::string& out) {
    if (src.family.empty()) throw CliError{kError, "bounds needs --family"};
    Text row;
    check(fa_rdc_estimate(src.family.c_str(), notion.c_str(), src.n, src.m, src.params.empty() ? nullptr : src.params.c_str(),
                          trials, exhaustive ? 1 : 0, src.seed, nullptr, nullptr, &row.p),
          "bounds");
    emit(std::string(fa_rdc_csv_header()) + "\n" + row.str() + "\n", out);
    return 0;
}

int cmd_hitset(const InstanceSource& src, const std::vector<std::string>& files, const std::string& notion,
               std::uint64_t trials, std::uint64_t budget, const std::string& out) {
    HitsetH h;
    if (!files.empty()) {
        std::vector<InstanceH> owned;
        std::vector<const fa_instance*> raw;
        for (const auto& f : files) {
            InstanceH inst;
            check(fa_instance_parse(read_file(f).c_str(), &inst.p), "parse instance");
            raw.push_back(inst.p);
            owned.push_back(std::move(inst));
        }
        check(fa_hitset_instances(raw.data(), raw.size(), notion.c_str(), budget, &h.p), "hitset");
    } else if (!src.family.empty()) {
        check(fa_hitset_family(src.family.c_str(), notion.c_str(), src.n, src.m,
                               src.params.empty() ? nullptr : src.params.c_str(), trials, src.seed, budget, &h.p),
              "hitset");
    } else {
        throw CliError{kError, "hitset needs --family or instance files"};
    }
    Text allocations;
    check(fa_hitset_allocations(h.p, &allocations.p), "allocations");
    std::cout << "size " << fa_hitset_size(h.p) << " exact " << (fa_hitset_exact(h.p) ? "yes" : "no")
              << " description_bits " << fa_hitset_description_bits(h.p) << "\n";
    if (!out.empty()) emit(allocations.str(), out);
    return 0;
}

int cmd_cyclic(const InstanceSource& src, const std::string& out) {
    InstanceH inst = src.load();
    int rotation = 0, bits = 0;
    AllocationH alloc;
    check(fa_cyclic_dc(inst.p, &rotation, &bits, &alloc.p), "cyclic");
    Text text;
    check(fa_allocation_serialize(alloc.p, &text.p), "serialize allocation");
    std::cout << "rotation " << rotation << " description_bits " << bits << "\n";
    emit(text.str(), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairalloc: communication protocols for fair division of indivisible items"};
    app.require_subcommand(1);

    std::string out, protocol, notion, format = "csv", config, allocation_path, transcript_path, transcript_out;
    std::uint64_t trials = 1000, hitset_trials = 0, budget = 0;
    int bundle_count = 0;
    bool exhaustive = false, wall_time = false;
    std::vector<std::string> files;
    InstanceSource src;

    app.add_subcommand("protocols", "list protocol ids with their fairness notions");

    auto* gen = app.add_subcommand("gen", "write a generated instance");
    src.add(gen);
    gen->add_option("--out,-o", out, "output file, stdout when omitted");

    auto* run = app.add_subcommand("run", "run one protocol and print allocation, transcript and verdicts");
    src.add(run);
    run->add_option("--protocol,-p", protocol, "protocol id")->required();
    run->add_option("--bundle-count", bundle_count, "bundle count override for tps-bundle");
    run->add_option("--out,-o", out, "write the allocation here");
    run->add_option("--transcript-out", transcript_out, "write the transcript here");

    auto* replay = app.add_subcommand("replay", "rebuild an allocation from a transcript");
    src.add(replay);
    replay->add_option("--protocol,-p", protocol, "protocol id")->required();
    replay->add_option("--transcript,-t", transcript_path, "transcript file")->required();
    replay->add_option("--bundle-count", bundle_count, "bundle count override for tps-bundle");
    replay->add_option("--out,-o", out, "output file, stdout when omitted");

    auto* sweep = app.add_subcommand("sweep", "run a JSON sweep config and export rows");
    sweep->add_option("config", config, "sweep config file")->required();
    sweep->add_option("--out,-o", out, "output file, stdout when omitted");
    sweep->add_option("--format", format, "csv or plotdata")->check(CLI::IsMember({"csv", "plotdata"}));
    sweep->add_flag("--wall-time", wall_time, "append a wall_time column to the csv");

    auto* chk = app.add_subcommand("check", "check an allocation file against a fairness notion");
    src.add(chk);
    chk->add_option("--allocation,-a", allocation_path, "allocation file")->required();
    chk->add_option("--notion", notion, "fairness notion")->required();

    auto* bounds = app.add_subcommand("bounds", "estimate the randomized description complexity lower bound");
    src.add(bounds);
    bounds->add_option("--notion", notion, "fairness notion")->required();
    bounds->add_option("--trials", trials, "sampled instances");
    bounds->add_flag("--exhaustive", exhaustive, "enumerate the family's support instead of sampling");
    bounds->add_option("--out,-o", out, "output file, stdout when omitted");

    auto* hitset = app.add_subcommand("hitset", "smallest set of allocations serving every instance");
    src.add(hitset);
    hitset->add_option("--notion", notion, "fairness notion")->required();
    hitset->add_option("--trials", hitset_trials, "sampled instances, 0 enumerates the whole family");
    hitset->add_option("--budget", budget, "search node budget, 0 keeps the default");
    hitset->add_option("files", files, "instance files");
    hitset->add_option("--out,-o", out, "write the allocations here");

    auto* cyclic = app.add_subcommand("cyclic", "rotation for the m = n + 1 unit-demand construction");
    src.add(cyclic);
    cyclic->add_option("--out,-o", out, "write the allocation here, stdout when omitted");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("protocols")) return cmd_protocols();
        if (*gen) return cmd_gen(src, out);
        if (*run) return cmd_run(src, protocol, bundle_count, out, transcript_out);
        if (*replay) return cmd_replay(src, protocol, bundle_count, transcript_path, out);
        if (*sweep) return cmd_sweep(config, out, format, wall_time);
        if (*chk) return cmd_check(src, allocation_path, notion);
        if (*bounds) return cmd_bounds(src, notion, trials, exhaustive, out);
        if (*hitset) return cmd_hitset(src, files, notion, hitset_trials, budget, out);
        if (*cyclic) return cmd_cyclic(src, out);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    }
    return kError;
}
