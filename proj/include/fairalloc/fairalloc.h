#ifndef FAIRALLOC_FAIRALLOC_H
#define FAIRALLOC_FAIRALLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FA_API __declspec(dllexport)
#else
#define FA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define FA_ABI_VERSION 1

typedef enum fa_status {
    FA_OK = 0,
    FA_ERR_NULL = 1,          /* a required pointer argument was NULL */
    FA_ERR_USAGE = 2,         /* bad argument, unknown id, violated precondition */
    FA_ERR_PARSE = 3,         /* malformed text */
    FA_ERR_VERSION = 4,       /* serialized format version mismatch */
    FA_ERR_SHAPE = 5,         /* n/m/value-matrix shapes disagree */
    FA_ERR_CAPACITY = 6,      /* input beyond an exact solver's cap or a budget */
    FA_ERR_INFEASIBLE = 7,    /* family parameters admit no instance */
    FA_ERR_PROTOCOL = 8,      /* a protocol invariant broke */
    FA_ERR_INTERNAL = 9
} fa_status;

typedef struct fa_instance fa_instance;
typedef struct fa_allocation fa_allocation;
typedef struct fa_outcome fa_outcome;
typedef struct fa_sweep fa_sweep;
typedef struct fa_hitset fa_hitset;

FA_API int fa_abi_version(void);
FA_API const char* fa_status_name(fa_status status);
/* Message of the last failed call on this thread; empty after a success. */
FA_API const char* fa_last_error(void);
/* Every char* handed out by this library is released here. */
FA_API void fa_string_free(char* s);

/* params: comma separated key=value pairs such as "k=2,max=50", or NULL. */
FA_API fa_status fa_instance_generate(const char* family, int n, int m, const char* params, uint64_t seed,
                                      fa_instance** out);
FA_API fa_status fa_instance_parse(const char* text, fa_instance** out);
FA_API fa_status fa_instance_serialize(const fa_instance* inst, char** out);
FA_API int fa_instance_n(const fa_instance* inst);
FA_API int fa_instance_m(const fa_instance* inst);
FA_API void fa_instance_free(fa_instance* inst);

FA_API fa_status fa_allocation_parse(const char* text, fa_allocation** out);
FA_API fa_status fa_allocation_serialize(const fa_allocation* alloc, char** out);
FA_API fa_status fa_allocation_owner(const fa_allocation* alloc, int item, int* owner);
FA_API void fa_allocation_free(fa_allocation* alloc);

FA_API size_t fa_protocol_count(void);
/* Static strings; NULL when index is out of range. */
FA_API const char* fa_protocol_id(size_t index);
FA_API const char* fa_protocol_summary(size_t index);
FA_API const char* fa_protocol_notion(size_t index);
FA_API fa_status fa_protocol_lookup(const char* id, size_t* index);

/* bundle_count 0 keeps the protocol's default. */
FA_API fa_status fa_run(const char* protocol, const fa_instance* inst, uint64_t crs_seed, int bundle_count,
                        fa_outcome** out);
/* Rebuilds the allocation from the instance's public shape and a transcript dump alone. */
FA_API fa_status fa_replay(const char* protocol, const fa_instance* shape, const char* transcript, uint64_t crs_seed,
                           int bundle_count, fa_allocation** out);
FA_API fa_status fa_outcome_allocation(const fa_outcome* outcome, fa_allocation** out);
FA_API fa_status fa_outcome_transcript(const fa_outcome* outcome, char** out);
FA_API fa_status fa_outcome_diagnostics(const fa_outcome* outcome, char** json_out);
FA_API uint64_t fa_outcome_integer_bits(const fa_outcome* outcome);
FA_API double fa_outcome_idealized_bits(const fa_outcome* outcome);
FA_API void fa_outcome_free(fa_outcome* outcome);

/* all_pass receives 1 when every agent passes; report lists one verdict per agent. */
FA_API fa_status fa_check(const fa_instance* inst, const fa_allocation* alloc, const char* notion, int* all_pass,
                          char** report);

FA_API fa_status fa_sweep_run(const char* config_json, fa_sweep** out);
FA_API fa_status fa_sweep_csv(const fa_sweep* sweep, int with_wall_time, char** out);
FA_API fa_status fa_sweep_plotdata(const fa_sweep* sweep, char** out);
FA_API size_t fa_sweep_row_count(const fa_sweep* sweep);
/* Rows whose pass rate is below one. */
FA_API size_t fa_sweep_failure_count(const fa_sweep* sweep);
FA_API fa_status fa_sweep_reproducers(const fa_sweep* sweep, char** out);
FA_API void fa_sweep_free(fa_sweep* sweep);

/* exhaustive != 0 enumerates the family's support and ignores trials. csv_row has no header. */
FA_API fa_status fa_rdc_estimate(const char* family, const char* notion, int n, int m, const char* params,
                                 uint64_t trials, int exhaustive, uint64_t seed, double* p_hat, double* bound_bits,
                                 char** csv_row);
FA_API const char* fa_rdc_csv_header(void);

/* trials 0 uses the family's whole support, otherwise that many generated instances. */
FA_API fa_status fa_hitset_family(const char* family, const char* notion, int n, int m, const char* params,
                                  uint64_t trials, uint64_t seed, uint64_t node_budget, fa_hitset** out);
FA_API fa_status fa_hitset_instances(const fa_instance* const* instances, size_t count, const char* notion,
                                     uint64_t node_budget, fa_hitset** out);
FA_API int fa_hitset_size(const fa_hitset* h);
FA_API int fa_hitset_exact(const fa_hitset* h);
FA_API int fa_hitset_description_bits(const fa_hitset* h);
/* One serialized allocation per entry, separated by blank lines. */
FA_API fa_status fa_hitset_allocations(const fa_hitset* h, char** out);
FA_API void fa_hitset_free(fa_hitset* h);

/* Unit-demand instance with m = n + 1. */
FA_API fa_status fa_cyclic_dc(const fa_instance* inst, int* rotation, int* description_bits, fa_allocation** out);

#ifdef __cplusplus
}
#endif

#endif
