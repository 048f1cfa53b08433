#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace fairalloc {

using Rational = boost::rational<std::int64_t>;
using Value = std::int64_t;
using Bundle = std::vector<int>;

// Error hierarchy shared by every module. The C API maps each kind to a code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UsageError : Error {
    using Error::Error;
};
struct CapacityError : Error {
    using Error::Error;
};
struct ProtocolFailure : Error {
    using Error::Error;
};
struct InfeasibleError : Error {
    using Error::Error;
};
enum class ParseErrorKind { Malformed, VersionMismatch, ShapeMismatch };
struct ParseError : Error {
    ParseError(ParseErrorKind k, const std::string& what) : Error(what), kind(k) {}
    ParseErrorKind kind;
};

enum class Kind { UnitDemand, BinaryAdditive, TwoValued, Additive };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

struct Valuation {
    Kind kind = Kind::Additive;
    std::vector<Value> values;  // true value of item e is values[e] / scale
    Value scale = 1;
    Value a = 0;  // TwoValued only
    Value b = 0;

    int m() const { return static_cast<int>(values.size()); }
    bool additive() const { return kind != Kind::UnitDemand; }
    Value total() const;
    // Throws UsageError when the class invariants do not hold.
    void validate() const;
};

struct Instance {
    int n = 0;
    int m = 0;
    Kind kind = Kind::Additive;
    Value scale = 1;
    Value a = 0;
    Value b = 0;
    std::vector<Valuation> agents;

    const Valuation& v(int i) const { return agents.at(i); }
    void validate() const;
    // Same shape and public parameters, every private value zeroed.
    Instance public_view() const;
};

Instance make_instance(Kind kind, const std::vector<std::vector<Value>>& values, Value scale = 1,
                       Value a = 0, Value b = 0);

// Allocation as item -> owner. Bundles are derived, disjoint and total by construction.
struct Allocation {
    int n = 0;
    std::vector<int> owner;

    Allocation() = default;
    Allocation(int agents, int items, int initial = 0) : n(agents), owner(items, initial) {}
    int m() const { return static_cast<int>(owner.size()); }
    std::vector<Bundle> bundles() const;
    Bundle bundle(int agent) const;
    static Allocation from_bundles(int n, int m, const std::vector<Bundle>& bundles);
    bool operator==(const Allocation&) const = default;
};

// Value in units of 1/scale. Max semantics for UnitDemand, sum otherwise.
Value raw_value(const Valuation& v, const Bundle& bundle);
Rational value_of(const Valuation& v, const Bundle& bundle);

// Top-n items (ties to the lower index) set to scale, all others to zero.
Valuation ud_to_binary(const Valuation& v, int n);
std::vector<int> top_items(const Valuation& v, int count);

enum class Family {
    UdRandom,
    UdIdentical,
    BinaryBalanced,
    BinaryRandom,
    TwoValuedRandom,
    TwoValuedHard,
    IdenticalAdditiveHard,
    Ef1Hard,
    AdditiveRandom,
};

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Optional knobs: "k", "K", "a", "b", "max" (value range), "p_num"/"p_den".
using FamilyParams = std::map<std::string, std::int64_t>;

Instance gen_instance(Family family, int n, int m, const FamilyParams& params, std::uint64_t seed);

// Versioned text format with canonical field order.
std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);

std::string serialize_allocation(const Allocation& a);
Allocation parse_allocation(const std::string& text);

}  // namespace fairalloc
