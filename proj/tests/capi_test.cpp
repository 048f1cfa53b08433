#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fairalloc/fairalloc.h"

#include <memory>
#include <string>

namespace {

struct StrFree {
    void operator()(char* s) const { fa_string_free(s); }
};
using Str = std::unique_ptr<char, StrFree>;

struct InstFree {
    void operator()(fa_instance* p) const { fa_instance_free(p); }
};
struct AllocFree {
    void operator()(fa_allocation* p) const { fa_allocation_free(p); }
};
struct OutcomeFree {
    void operator()(fa_outcome* p) const { fa_outcome_free(p); }
};
using Inst = std::unique_ptr<fa_instance, InstFree>;
using Alloc = std::unique_ptr<fa_allocation, AllocFree>;
using Out = std::unique_ptr<fa_outcome, OutcomeFree>;

Inst generate(const char* family, int n, int m, const char* params, uint64_t seed) {
    fa_instance* p = nullptr;
    REQUIRE(fa_instance_generate(family, n, m, params, seed, &p) == FA_OK);
    return Inst(p);
}

std::string take(char* s) {
    Str hold(s);
    return s ? std::string(s) : std::string();
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(fa_abi_version() == FA_ABI_VERSION);
    CHECK(std::string(fa_status_name(FA_OK)) == "ok");
    CHECK(std::string(fa_status_name(FA_ERR_PARSE)) != std::string(fa_status_name(FA_ERR_SHAPE)));
    fa_string_free(nullptr);
}

TEST_CASE("null arguments are reported, not dereferenced") {
    fa_instance* inst = nullptr;
    CHECK(fa_instance_generate(nullptr, 2, 4, nullptr, 1, &inst) == FA_ERR_NULL);
    CHECK(fa_instance_generate("additive_random", 2, 4, nullptr, 1, nullptr) == FA_ERR_NULL);
    CHECK(fa_instance_parse(nullptr, &inst) == FA_ERR_NULL);
    CHECK(std::string(fa_last_error()).size() > 0);
    CHECK(fa_instance_n(nullptr) == -1);
    char* text = nullptr;
    CHECK(fa_instance_serialize(nullptr, &text) == FA_ERR_NULL);
    fa_instance_free(nullptr);
    fa_outcome_free(nullptr);
}

TEST_CASE("instance round trip and error codes") {
    Inst inst = generate("additive_random", 3, 7, "max=9", 42);
    CHECK(fa_instance_n(inst.get()) == 3);
    CHECK(fa_instance_m(inst.get()) == 7);
    char* raw = nullptr;
    REQUIRE(fa_instance_serialize(inst.get(), &raw) == FA_OK);
    std::string text = take(raw);
    CHECK(std::string(fa_last_error()).empty());

    fa_instance* back = nullptr;
    REQUIRE(fa_instance_parse(text.c_str(), &back) == FA_OK);
    Inst hold(back);
    REQUIRE(fa_instance_serialize(back, &raw) == FA_OK);
    CHECK(take(raw) == text);

    fa_instance* bad = nullptr;
    CHECK(fa_instance_parse("garbage", &bad) == FA_ERR_PARSE);
    CHECK(bad == nullptr);
    std::string other = text;
    other.replace(other.find(" 1\n"), 3, " 2\n");
    CHECK(fa_instance_parse(other.c_str(), &bad) == FA_ERR_VERSION);
    CHECK(fa_instance_generate("binary_balanced", 2, 6, "k=2", 1, &bad) == FA_ERR_INFEASIBLE);
    CHECK(fa_instance_generate("no_family", 2, 6, nullptr, 1, &bad) == FA_ERR_USAGE);
    CHECK(fa_instance_generate("additive_random", 2, 6, "k", 1, &bad) == FA_ERR_USAGE);
}

TEST_CASE("protocol registry is visible") {
    const size_t count = fa_protocol_count();
    CHECK(count >= 19);
    size_t index = 0;
    REQUIRE(fa_protocol_lookup("rud", &index) == FA_OK);
    CHECK(std::string(fa_protocol_id(index)) == "rud");
    CHECK(std::string(fa_protocol_notion(index)) == "mms");
    CHECK(fa_protocol_id(count) == nullptr);
    CHECK(fa_protocol_lookup("nope", &index) == FA_ERR_USAGE);
}

TEST_CASE("run, check and replay") {
    Inst inst = generate("additive_random", 4, 20, nullptr, 7);
    fa_outcome* raw = nullptr;
    REQUIRE(fa_run("prop1-det", inst.get(), 3, 0, &raw) == FA_OK);
    Out out(raw);
    CHECK(fa_outcome_integer_bits(out.get()) > 0);
    CHECK(fa_outcome_idealized_bits(out.get()) <= static_cast<double>(fa_outcome_integer_bits(out.get())));

    fa_allocation* a = nullptr;
    REQUIRE(fa_outcome_allocation(out.get(), &a) == FA_OK);
    Alloc alloc(a);
    int pass = 0;
    char* report = nullptr;
    REQUIRE(fa_check(inst.get(), alloc.get(), "prop1", &pass, &report) == FA_OK);
    CHECK(pass == 1);
    CHECK(take(report).size() > 0);
    CHECK(fa_check(inst.get(), alloc.get(), "bogus", &pass, nullptr) == FA_ERR_USAGE);

    char* tape = nullptr;
    REQUIRE(fa_outcome_transcript(out.get(), &tape) == FA_OK);
    std::string dump = take(tape);
    fa_allocation* r = nullptr;
    REQUIRE(fa_replay("prop1-det", inst.get(), dump.c_str(), 3, 0, &r) == FA_OK);
    Alloc replayed(r);
    char *s1 = nullptr, *s2 = nullptr;
    REQUIRE(fa_allocation_serialize(alloc.get(), &s1) == FA_OK);
    REQUIRE(fa_allocation_serialize(replayed.get(), &s2) == FA_OK);
    CHECK(take(s1) == take(s2));
    CHECK(fa_replay("prop1-det", inst.get(), "", 3, 0, &r) == FA_ERR_PROTOCOL);

    int owner = -1;
    CHECK(fa_allocation_owner(alloc.get(), 0, &owner) == FA_OK);
    CHECK((owner >= 0 && owner < 4));
    CHECK(fa_allocation_owner(alloc.get(), 20, &owner) == FA_ERR_USAGE);

    char* diag = nullptr;
    REQUIRE(fa_outcome_diagnostics(out.get(), &diag) == FA_OK);
    CHECK(take(diag).front() == '{');

    CHECK(fa_run("rud", inst.get(), 3, 0, &raw) == FA_ERR_USAGE);
}

TEST_CASE("allocation text") {
    Inst inst = generate("additive_random", 2, 3, nullptr, 1);
    fa_outcome* raw = nullptr;
    REQUIRE(fa_run("round-robin", inst.get(), 1, 0, &raw) == FA_OK);
    Out out(raw);
    fa_allocation* a = nullptr;
    REQUIRE(fa_outcome_allocation(out.get(), &a) == FA_OK);
    Alloc alloc(a);
    char* text = nullptr;
    REQUIRE(fa_allocation_serialize(alloc.get(), &text) == FA_OK);
    std::string t = take(text);
    fa_allocation* back = nullptr;
    REQUIRE(fa_allocation_parse(t.c_str(), &back) == FA_OK);
    fa_allocation_free(back);
    CHECK(fa_allocation_parse("nonsense", &back) == FA_ERR_PARSE);
}

TEST_CASE("sweep through the C API") {
    const char* cfg = R"({"seed": 2, "trials": 5, "experiments": [{"protocol": "binary3p", "n": 4, "m": 16}]})";
    fa_sweep* s = nullptr;
    REQUIRE(fa_sweep_run(cfg, &s) == FA_OK);
    CHECK(fa_sweep_row_count(s) == 1);
    CHECK(fa_sweep_failure_count(s) == 0);
    char* csv = nullptr;
    REQUIRE(fa_sweep_csv(s, 0, &csv) == FA_OK);
    std::string c = take(csv);
    CHECK(c.rfind("protocol,family,n,m,trials", 0) == 0);
    CHECK(c.find("binary3p,binary_random,4,16,5,") != std::string::npos);
    char* plot = nullptr;
    REQUIRE(fa_sweep_plotdata(s, &plot) == FA_OK);
    CHECK(take(plot).front() == '#');
    char* reps = nullptr;
    REQUIRE(fa_sweep_reproducers(s, &reps) == FA_OK);
    CHECK(take(reps).empty());
    fa_sweep_free(s);
    CHECK(fa_sweep_run("{", &s) == FA_ERR_PARSE);
}

TEST_CASE("lower-bound lab through the C API") {
    double p = 0, bound = 0;
    char* row = nullptr;
    REQUIRE(fa_rdc_estimate("binary_balanced", "mms", 2, 8, "k=2", 0, 1, 1, &p, &bound, &row) == FA_OK);
    CHECK(p == doctest::Approx(36.0 / 70.0));
    CHECK(take(row).rfind("binary_balanced,mms,2,8,70,", 0) == 0);
    CHECK(std::string(fa_rdc_csv_header()).rfind("family,notion", 0) == 0);

    fa_hitset* h = nullptr;
    REQUIRE(fa_hitset_family("binary_balanced", "mms", 2, 8, "k=2", 0, 1, 0, &h) == FA_OK);
    CHECK(fa_hitset_size(h) >= 2);
    CHECK(fa_hitset_exact(h) == 1);
    char* allocs = nullptr;
    REQUIRE(fa_hitset_allocations(h, &allocs) == FA_OK);
    CHECK(!take(allocs).empty());
    fa_hitset_free(h);

    Inst one = generate("additive_random", 2, 3, nullptr, 5);
    const fa_instance* list[] = {one.get()};
    REQUIRE(fa_hitset_instances(list, 1, "mms", 0, &h) == FA_OK);
    CHECK(fa_hitset_size(h) == 1);
    CHECK(fa_hitset_description_bits(h) == 0);
    fa_hitset_free(h);
}

TEST_CASE("cyclic rotation through the C API") {
    Inst inst = generate("ud_random", 4, 5, nullptr, 9);
    int rotation = 0, bits = 0;
    fa_allocation* a = nullptr;
    REQUIRE(fa_cyclic_dc(inst.get(), &rotation, &bits, &a) == FA_OK);
    Alloc alloc(a);
    CHECK((rotation >= 1 && rotation <= 4));
    CHECK(bits == 2);
    int pass = 0;
    REQUIRE(fa_check(inst.get(), alloc.get(), "mms", &pass, nullptr) == FA_OK);
    CHECK(pass == 1);
    Inst wrong = generate("ud_random", 2, 6, nullptr, 9);
    CHECK(fa_cyclic_dc(wrong.get(), &rotation, &bits, &a) == FA_ERR_USAGE);
}
