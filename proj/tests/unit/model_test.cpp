#include <set>

#include "doctest.h"
#include "fairalloc/channel.hpp"
#include "fairalloc/model.hpp"
#include "fairalloc/shares.hpp"
#include "oracles.hpp"

using namespace fairalloc;

namespace {

Valuation val(Kind k, std::vector<Value> values) {
    Valuation v;
    v.kind = k;
    v.values = std::move(values);
    return v;
}

std::set<int> ones(const Valuation& v) {
    std::set<int> s;
    for (int e = 0; e < v.m(); ++e)
        if (v.values[e] == v.scale) s.insert(e);
    return s;
}

const Family kAllFamilies[] = {Family::UdRandom,        Family::UdIdentical,   Family::BinaryBalanced,
                               Family::BinaryRandom,    Family::TwoValuedRandom, Family::TwoValuedHard,
                               Family::IdenticalAdditiveHard, Family::Ef1Hard,  Family::AdditiveRandom};

}  // namespace

TEST_CASE("value_of sums additive bundles and maxes unit-demand bundles") {
    CHECK(value_of(val(Kind::Additive, {3, 7, 2}), {0, 1}) == Rational(10));
    CHECK(value_of(val(Kind::UnitDemand, {3, 7, 2}), {0, 2}) == Rational(3));
    for (Kind k : {Kind::Additive, Kind::UnitDemand}) CHECK(value_of(val(k, {3, 7, 2}), {}) == Rational(0));
    CHECK_THROWS_AS(value_of(val(Kind::Additive, {1, 2}), {2}), UsageError);
}

TEST_CASE("value_of is monotone under inclusion") {
    Stream rng(11);
    for (int t = 0; t < 200; ++t) {
        const int m = 1 + static_cast<int>(rng.below(8));
        std::vector<Value> row(m);
        for (auto& x : row) x = static_cast<Value>(rng.below(20));
        for (Kind k : {Kind::Additive, Kind::UnitDemand}) {
            Valuation v = val(k, row);
            Bundle small, big;
            for (int e = 0; e < m; ++e) {
                bool in_big = rng.coin();
                if (in_big) big.push_back(e);
                if (in_big && rng.coin()) small.push_back(e);
            }
            CHECK(value_of(v, small) <= value_of(v, big));
        }
    }
}

TEST_CASE("ud_to_binary keeps the top n items with lowest-index ties") {
    CHECK(ones(ud_to_binary(val(Kind::UnitDemand, {5, 9, 9, 1}), 2)) == std::set<int>{1, 2});
    CHECK(ones(ud_to_binary(val(Kind::UnitDemand, {1, 1, 1}), 3)) == std::set<int>{0, 1, 2});
    CHECK(ones(ud_to_binary(val(Kind::UnitDemand, {7, 7, 7, 7}), 2)) == std::set<int>{0, 1});
    CHECK_THROWS(ud_to_binary(val(Kind::UnitDemand, {1, 2}), 3));
}

TEST_CASE("MMS for the binary image gives each agent one of her top-n items") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3), m = n + 1 + static_cast<int>(seed % 4);
        Instance inst = gen_instance(Family::UdRandom, n, m, {}, seed);
        std::vector<oracle::Row> image;
        for (const auto& v : inst.agents) image.push_back(ud_to_binary(v, n).values);
        oracle::for_each_assignment(n, m, [&](const std::vector<int>& owner) {
            bool binary_mms = true;
            for (int i = 0; i < n; ++i) {
                bool has_one = false;
                for (int e = 0; e < m; ++e) has_one |= owner[e] == i && image[i][e] > 0;
                binary_mms &= has_one;
            }
            if (!binary_mms) return;
            for (int i = 0; i < n; ++i) {
                auto top = top_items(inst.agents[i], n);
                bool got_top = false;
                for (int e : top) got_top |= owner[e] == i;
                CHECK(got_top);
            }
        });
    }
}

TEST_CASE("family generators honour their defining invariants") {
    SUBCASE("identical additive hard") {
        Instance inst = gen_instance(Family::IdenticalAdditiveHard, 2, 4, {{"k", 2}, {"K", 16}}, 3);
        std::multiset<Value> got(inst.agents[0].values.begin(), inst.agents[0].values.end());
        CHECK(got == std::multiset<Value>{14, 15, 257, 258});
        CHECK(oracle::mms(inst.agents[0].values, 2) == 272);
        CHECK(mms_exact(inst.agents[0], 2).value == Rational(272));
    }
    SUBCASE("two-valued hard") {
        Instance inst = gen_instance(Family::TwoValuedHard, 2, 10, {{"k", 2}}, 5);
        CHECK(inst.scale == 5);
        CHECK(std::count(inst.agents[0].values.begin(), inst.agents[0].values.end(), 5) == 5);
        CHECK(std::count(inst.agents[0].values.begin(), inst.agents[0].values.end(), 1) == 5);
        CHECK(Rational(oracle::mms(inst.agents[0].values, 2), inst.scale) == Rational(3));
        CHECK(mms_share(inst.agents[0], 2) == Rational(3));
    }
    SUBCASE("binary balanced") {
        Instance inst = gen_instance(Family::BinaryBalanced, 2, 8, {{"k", 2}}, 7);
        CHECK(ones(inst.agents[0]).size() == 4);
        CHECK(inst.agents[0].values == inst.agents[1].values);
        CHECK(oracle::mms(inst.agents[0].values, 2) == 2);
    }
    SUBCASE("ef1 hard rows carry exactly k ones") {
        Instance inst = gen_instance(Family::Ef1Hard, 3, 9, {{"k", 4}}, 1);
        for (const auto& v : inst.agents) CHECK(ones(v).size() == 4);
    }
    SUBCASE("infeasible parameters name the constraint") {
        CHECK_THROWS_AS(gen_instance(Family::BinaryBalanced, 2, 6, {{"k", 2}}, 1), InfeasibleError);
        CHECK_THROWS_AS(gen_instance(Family::TwoValuedHard, 2, 8, {{"k", 2}}, 1), InfeasibleError);
        CHECK_THROWS_AS(gen_instance(Family::AdditiveRandom, 0, 3, {}, 1), InfeasibleError);
    }
}

TEST_CASE("generators are deterministic in the seed") {
    for (Family f : kAllFamilies) {
        const int n = 2, m = f == Family::TwoValuedHard ? 6 : 8;
        CHECK(serialize_instance(gen_instance(f, n, m, {}, 99)) == serialize_instance(gen_instance(f, n, m, {}, 99)));
    }
}

TEST_CASE("instance text round-trips for every family") {
    for (Family f : kAllFamilies)
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const int n = 1 + static_cast<int>(seed % 3);
            const int m = f == Family::TwoValuedHard ? 2 * n + 1 + static_cast<int>(seed % (2 * n))
                                                     : 2 * n * 2 + static_cast<int>(seed % 5);
            Instance inst = gen_instance(f, n, m, {}, seed);
            const std::string text = serialize_instance(inst);
            Instance back = parse_instance(text);
            CHECK(serialize_instance(back) == text);
            CHECK(back.kind == inst.kind);
            CHECK(back.scale == inst.scale);
        }
}

TEST_CASE("instance parsing rejects bad documents with distinct kinds") {
    const std::string good = serialize_instance(make_instance(Kind::Additive, {{1, 2, 3}, {3, 2, 1}}));
    auto kind_of = [](const std::string& text) {
        try {
            parse_instance(text);
        } catch (const ParseError& e) {
            return static_cast<int>(e.kind);
        }
        return -1;
    };
    CHECK(kind_of(good.substr(0, good.size() / 2)) >= 0);
    CHECK(kind_of("fairalloc-instance 2\n" + good.substr(good.find('\n') + 1)) ==
          static_cast<int>(ParseErrorKind::VersionMismatch));
    std::string wide = good;
    wide.replace(wide.find("1 2 3"), 5, "1 2 3 4");
    CHECK(kind_of(wide) == static_cast<int>(ParseErrorKind::ShapeMismatch));
    std::string zero_scale = good;
    zero_scale.replace(zero_scale.find("scale 1"), 7, "scale 0");
    CHECK(kind_of(zero_scale) == static_cast<int>(ParseErrorKind::Malformed));
    CHECK(kind_of("garbage") == static_cast<int>(ParseErrorKind::Malformed));
}

TEST_CASE("allocations round-trip and keep bundles disjoint and total") {
    Allocation a = Allocation::from_bundles(3, 5, {{0, 4}, {}, {1, 2, 3}});
    CHECK(parse_allocation(serialize_allocation(a)) == a);
    auto b = a.bundles();
    CHECK(b[0] == Bundle{0, 4});
    CHECK(b[1].empty());
    CHECK_THROWS(Allocation::from_bundles(2, 3, {{0, 1}, {1, 2}}));
    CHECK_THROWS(Allocation::from_bundles(2, 3, {{0}, {1}}));
}
