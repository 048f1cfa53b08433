#include "fairalloc/fairalloc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "fairalloc/bounds.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/protocols.hpp"
#include "json.hpp"

struct fa_instance {
    fairalloc::Instance inst;
};
struct fa_allocation {
    fairalloc::Allocation alloc;
};
struct fa_outcome {
    std::string protocol;
    fairalloc::Outcome outcome;
};
struct fa_sweep {
    std::vector<fairalloc::ExperimentRow> rows;
};
struct fa_hitset {
    fairalloc::HittingSetResult result;
};

namespace {

using namespace fairalloc;

thread_local std::string g_last_error;

fa_status fail(fa_status s, const char* what) {
    g_last_error = what;
    return s;
}

// Maps every exception the core may raise onto a status and records its message.
template <class F>
fa_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return FA_OK;
    } catch (const ParseError& e) {
        switch (e.kind) {
            case ParseErrorKind::VersionMismatch:
                return fail(FA_ERR_VERSION, e.what());
            case ParseErrorKind::ShapeMismatch:
                return fail(FA_ERR_SHAPE, e.what());
            default:
                return fail(FA_ERR_PARSE, e.what());
        }
    } catch (const UsageError& e) {
        return fail(FA_ERR_USAGE, e.what());
    } catch (const CapacityError& e) {
        return fail(FA_ERR_CAPACITY, e.what());
    } catch (const InfeasibleError& e) {
        return fail(FA_ERR_INFEASIBLE, e.what());
    } catch (const ProtocolFailure& e) {
        return fail(FA_ERR_PROTOCOL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FA_ERR_CAPACITY, "out of memory");
    } catch (const std::exception& e) {
        return fail(FA_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(FA_ERR_INTERNAL, "unknown error");
    }
}

template <class... Ptrs>
bool any_null(const Ptrs*... ptrs) {
    return ((ptrs == nullptr) || ...);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

FamilyParams parse_params(const char* text) {
    FamilyParams params;
    if (!text) return params;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("family parameter '" + item + "' is not key=value");
        try {
            std::size_t used = 0;
            std::string value = item.substr(eq + 1);
            params[item.substr(0, eq)] = std::stoll(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw UsageError("family parameter '" + item + "' has a non-integer value");
        }
    }
    return params;
}

RunOptions run_options(const ProtocolSpec& spec, int bundle_count) {
    RunOptions o = spec.defaults;
    if (bundle_count < 0) throw UsageError("bundle_count must be non-negative");
    if (bundle_count > 0) o.bundle_count = bundle_count;
    return o;
}

nlohmann::json diagnostics_json(const Diagnostics& d) {
    nlohmann::json j;
    j["ell"] = d.sad;
    j["targets"] = d.targets;
    j["prefix_start"] = d.prefix_start;
    j["prefix_length"] = d.prefix_length;
    j["leftover"] = d.leftover;
    j["holes"] = d.holes;
    j["non_holes"] = d.non_holes;
    j["eligible_ranks"] = d.eligible_ranks;
    j["retries"] = d.retries;
    j["bundles"] = d.bundles;
    j["queries"] = d.queries;
    return j;
}

}  // namespace

extern "C" {

FA_API int fa_abi_version(void) { return FA_ABI_VERSION; }

FA_API const char* fa_status_name(fa_status status) {
    switch (status) {
        case FA_OK: return "ok";
        case FA_ERR_NULL: return "null argument";
        case FA_ERR_USAGE: return "usage error";
        case FA_ERR_PARSE: return "parse error";
        case FA_ERR_VERSION: return "version mismatch";
        case FA_ERR_SHAPE: return "shape mismatch";
        case FA_ERR_CAPACITY: return "capacity exceeded";
        case FA_ERR_INFEASIBLE: return "infeasible parameters";
        case FA_ERR_PROTOCOL: return "protocol failure";
        case FA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

FA_API const char* fa_last_error(void) { return g_last_error.c_str(); }

FA_API void fa_string_free(char* s) { std::free(s); }

FA_API fa_status fa_instance_generate(const char* family, int n, int m, const char* params, uint64_t seed,
                                      fa_instance** out) {
    if (any_null(family, out)) return fail(FA_ERR_NULL, "family and out are required");
    return guarded([&] {
        auto inst = gen_instance(family_from_string(family), n, m, parse_params(params), seed);
        *out = new fa_instance{std::move(inst)};
    });
}

FA_API fa_status fa_instance_parse(const char* text, fa_instance** out) {
    if (any_null(text, out)) return fail(FA_ERR_NULL, "text and out are required");
    return guarded([&] { *out = new fa_instance{parse_instance(text)}; });
}

FA_API fa_status fa_instance_serialize(const fa_instance* inst, char** out) {
    if (any_null(inst, out)) return fail(FA_ERR_NULL, "inst and out are required");
    return guarded([&] { *out = dup_string(serialize_instance(inst->inst)); });
}

FA_API int fa_instance_n(const fa_instance* inst) { return inst ? inst->inst.n : -1; }
FA_API int fa_instance_m(const fa_instance* inst) { return inst ? inst->inst.m : -1; }
FA_API void fa_instance_free(fa_instance* inst) { delete inst; }

FA_API fa_status fa_allocation_parse(const char* text, fa_allocation** out) {
    if (any_null(text, out)) return fail(FA_ERR_NULL, "text and out are required");
    return guarded([&] { *out = new fa_allocation{parse_allocation(text)}; });
}

FA_API fa_status fa_allocation_serialize(const fa_allocation* alloc, char** out) {
    if (any_null(alloc, out)) return fail(FA_ERR_NULL, "alloc and out are required");
    return guarded([&] { *out = dup_string(serialize_allocation(alloc->alloc)); });
}

FA_API fa_status fa_allocation_owner(const fa_allocation* alloc, int item, int* owner) {
    if (any_null(alloc, owner)) return fail(FA_ERR_NULL, "alloc and owner are required");
    if (item < 0 || item >= alloc->alloc.m()) return fail(FA_ERR_USAGE, "item index out of range");
    *owner = alloc->alloc.owner[item];
    g_last_error.clear();
    return FA_OK;
}

FA_API void fa_allocation_free(fa_allocation* alloc) { delete alloc; }

FA_API size_t fa_protocol_count(void) { return protocol_registry().size(); }

FA_API const char* fa_protocol_id(size_t index) {
    const auto& r = protocol_registry();
    return index < r.size() ? r[index].id.c_str() : nullptr;
}

FA_API const char* fa_protocol_summary(size_t index) {
    const auto& r = protocol_registry();
    return index < r.size() ? r[index].summary.c_str() : nullptr;
}

FA_API const char* fa_protocol_notion(size_t index) {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& spec : protocol_registry()) v.push_back(to_string(spec.notion));
        return v;
    }();
    return index < names.size() ? names[index].c_str() : nullptr;
}

FA_API fa_status fa_protocol_lookup(const char* id, size_t* index) {
    if (any_null(id, index)) return fail(FA_ERR_NULL, "id and index are required");
    const auto& r = protocol_registry();
    for (size_t i = 0; i < r.size(); ++i)
        if (r[i].id == id) {
            *index = i;
            g_last_error.clear();
            return FA_OK;
        }
    return fail(FA_ERR_USAGE, "unknown protocol id");
}

FA_API fa_status fa_run(const char* protocol, const fa_instance* inst, uint64_t crs_seed, int bundle_count,
                        fa_outcome** out) {
    if (any_null(protocol, inst, out)) return fail(FA_ERR_NULL, "protocol, inst and out are required");
    return guarded([&] {
        const ProtocolSpec& spec = find_protocol(protocol);
        auto outcome = run_protocol(spec, inst->inst, Crs(crs_seed), run_options(spec, bundle_count));
        *out = new fa_outcome{spec.id, std::move(outcome)};
    });
}

FA_API fa_status fa_replay(const char* protocol, const fa_instance* shape, const char* transcript, uint64_t crs_seed,
                           int bundle_count, fa_allocation** out) {
    if (any_null(protocol, shape, transcript, out))
        return fail(FA_ERR_NULL, "protocol, shape, transcript and out are required");
    return guarded([&] {
        const ProtocolSpec& spec = find_protocol(protocol);
        auto outcome = replay_protocol(spec.id, public_of(shape->inst), Transcript::parse(transcript), Crs(crs_seed),
                                       run_options(spec, bundle_count));
        *out = new fa_allocation{std::move(outcome.allocation)};
    });
}

FA_API fa_status fa_outcome_allocation(const fa_outcome* outcome, fa_allocation** out) {
    if (any_null(outcome, out)) return fail(FA_ERR_NULL, "outcome and out are required");
    return guarded([&] { *out = new fa_allocation{outcome->outcome.allocation}; });
}

FA_API fa_status fa_outcome_transcript(const fa_outcome* outcome, char** out) {
    if (any_null(outcome, out)) return fail(FA_ERR_NULL, "outcome and out are required");
    return guarded([&] { *out = dup_string(outcome->outcome.transcript.dump()); });
}

FA_API fa_status fa_outcome_diagnostics(const fa_outcome* outcome, char** json_out) {
    if (any_null(outcome, json_out)) return fail(FA_ERR_NULL, "outcome and json_out are required");
    return guarded([&] { *json_out = dup_string(diagnostics_json(outcome->outcome.diag).dump()); });
}

FA_API uint64_t fa_outcome_integer_bits(const fa_outcome* outcome) {
    return outcome ? outcome->outcome.transcript.integer_bits() : 0;
}

FA_API double fa_outcome_idealized_bits(const fa_outcome* outcome) {
    return outcome ? outcome->outcome.transcript.idealized_bits() : 0;
}

FA_API void fa_outcome_free(fa_outcome* outcome) { delete outcome; }

FA_API fa_status fa_check(const fa_instance* inst, const fa_allocation* alloc, const char* notion, int* all_pass_out,
                          char** report) {
    if (any_null(inst, alloc, notion, all_pass_out)) return fail(FA_ERR_NULL, "inst, alloc, notion and all_pass are required");
    return guarded([&] {
        const Allocation& a = alloc->alloc;
        if (a.n != inst->inst.n || a.m() != inst->inst.m)
            throw ParseError(ParseErrorKind::ShapeMismatch, "allocation shape differs from the instance");
        auto verdicts = check_notion(inst->inst, a, notion_from_string(notion));
        *all_pass_out = all_pass(verdicts) ? 1 : 0;
        if (report) *report = dup_string(verdicts_to_text(verdicts));
    });
}

FA_API fa_status fa_sweep_run(const char* config_json, fa_sweep** out) {
    if (any_null(config_json, out)) return fail(FA_ERR_NULL, "config_json and out are required");
    return guarded([&] { *out = new fa_sweep{run_sweep(parse_sweep_config(config_json))}; });
}

FA_API fa_status fa_sweep_csv(const fa_sweep* sweep, int with_wall_time, char** out) {
    if (any_null(sweep, out)) return fail(FA_ERR_NULL, "sweep and out are required");
    return guarded([&] { *out = dup_string(to_csv(sweep->rows, with_wall_time != 0)); });
}

FA_API fa_status fa_sweep_plotdata(const fa_sweep* sweep, char** out) {
    if (any_null(sweep, out)) return fail(FA_ERR_NULL, "sweep and out are required");
    return guarded([&] { *out = dup_string(to_plotdata(sweep->rows)); });
}

FA_API size_t fa_sweep_row_count(const fa_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

FA_API size_t fa_sweep_failure_count(const fa_sweep* sweep) {
    size_t failed = 0;
    if (sweep)
        for (const auto& r : sweep->rows) failed += r.failure.has_value();
    return failed;
}

FA_API fa_status fa_sweep_reproducers(const fa_sweep* sweep, char** out) {
    if (any_null(sweep, out)) return fail(FA_ERR_NULL, "sweep and out are required");
    return guarded([&] {
        std::string text;
        for (const auto& r : sweep->rows)
            if (r.failure) text += reproducer_text(*r.failure) + "\n";
        *out = dup_string(text);
    });
}

FA_API void fa_sweep_free(fa_sweep* sweep) { delete sweep; }

FA_API fa_status fa_rdc_estimate(const char* family, const char* notion, int n, int m, const char* params,
                                 uint64_t trials, int exhaustive, uint64_t seed, double* p_hat, double* bound_bits,
                                 char** csv_row) {
    if (any_null(family, notion)) return fail(FA_ERR_NULL, "family and notion are required");
    return guarded([&] {
        RdcOptions opts;
        opts.exhaustive = exhaustive != 0;
        opts.trials = trials;
        opts.params = parse_params(params);
        auto e = estimate_rdc_bound(family_from_string(family), notion_from_string(notion), n, m, Crs(seed), opts);
        if (p_hat) *p_hat = e.p_hat;
        if (bound_bits) *bound_bits = e.bound_bits;
        if (csv_row) *csv_row = dup_string(rdc_csv_row(e));
    });
}

FA_API const char* fa_rdc_csv_header(void) {
    static const std::string header = rdc_csv_header();
    return header.c_str();
}

FA_API fa_status fa_hitset_family(const char* family, const char* notion, int n, int m, const char* params,
                                  uint64_t trials, uint64_t seed, uint64_t node_budget, fa_hitset** out) {
    if (any_null(family, notion, out)) return fail(FA_ERR_NULL, "family, notion and out are required");
    return guarded([&] {
        const Family f = family_from_string(family);
        const FamilyParams p = parse_params(params);
        std::vector<Instance> instances;
        if (trials == 0) {
            instances = enumerate_family(f, n, m, p);
        } else {
            for (uint64_t t = 0; t < trials; ++t) instances.push_back(gen_instance(f, n, m, p, derive_seed(seed, "hitset", t)));
        }
        HittingSetBudget budget;
        if (node_budget > 0) budget.max_nodes = node_budget;
        *out = new fa_hitset{min_hitting_set(instances, notion_from_string(notion), budget)};
    });
}

FA_API fa_status fa_hitset_instances(const fa_instance* const* instances, size_t count, const char* notion,
                                     uint64_t node_budget, fa_hitset** out) {
    if (any_null(notion, out) || (count > 0 && instances == nullptr))
        return fail(FA_ERR_NULL, "instances, notion and out are required");
    for (size_t i = 0; i < count; ++i)
        if (!instances[i]) return fail(FA_ERR_NULL, "instance list holds a NULL entry");
    return guarded([&] {
        std::vector<Instance> list;
        for (size_t i = 0; i < count; ++i) list.push_back(instances[i]->inst);
        HittingSetBudget budget;
        if (node_budget > 0) budget.max_nodes = node_budget;
        *out = new fa_hitset{min_hitting_set(list, notion_from_string(notion), budget)};
    });
}

FA_API int fa_hitset_size(const fa_hitset* h) { return h ? h->result.size : -1; }
FA_API int fa_hitset_exact(const fa_hitset* h) { return h ? (h->result.exact ? 1 : 0) : -1; }
FA_API int fa_hitset_description_bits(const fa_hitset* h) { return h ? h->result.description_bits : -1; }

FA_API fa_status fa_hitset_allocations(const fa_hitset* h, char** out) {
    if (any_null(h, out)) return fail(FA_ERR_NULL, "h and out are required");
    return guarded([&] {
        std::string text;
        for (std::size_t i = 0; i < h->result.allocations.size(); ++i) {
            if (i > 0) text += "\n";
            text += serialize_allocation(h->result.allocations[i]);
        }
        *out = dup_string(text);
    });
}

FA_API void fa_hitset_free(fa_hitset* h) { delete h; }

FA_API fa_status fa_cyclic_dc(const fa_instance* inst, int* rotation, int* description_bits, fa_allocation** out) {
    if (any_null(inst, rotation)) return fail(FA_ERR_NULL, "inst and rotation are required");
    return guarded([&] {
        auto r = cyclic_mms_dc(inst->inst);
        *rotation = r.rotation;
        if (description_bits) *description_bits = r.description_bits;
        if (out) *out = new fa_allocation{std::move(r.allocation)};
    });
}

}  // extern "C"
