#include "fairalloc/model.hpp"

#include <algorithm>
#include <numeric>

namespace fairalloc {

std::string to_string(Kind k) {
    switch (k) {
        case Kind::UnitDemand: return "unit_demand";
        case Kind::BinaryAdditive: return "binary";
        case Kind::TwoValued: return "two_valued";
        case Kind::Additive: return "additive";
    }
    return "?";
}

Kind kind_from_string(const std::string& s) {
    if (s == "unit_demand") return Kind::UnitDemand;
    if (s == "binary") return Kind::BinaryAdditive;
    if (s == "two_valued") return Kind::TwoValued;
    if (s == "additive") return Kind::Additive;
    throw UsageError("unknown valuation kind '" + s + "'");
}

Value Valuation::total() const {
    if (kind == Kind::UnitDemand) return values.empty() ? 0 : *std::max_element(values.begin(), values.end());
    return std::accumulate(values.begin(), values.end(), Value{0});
}

void Valuation::validate() const {
    if (scale <= 0) throw UsageError("scale must be positive");
    for (Value x : values) {
        if (x < 0) throw UsageError("item values must be non-negative");
        if (kind == Kind::BinaryAdditive && x != 0 && x != scale)
            throw UsageError("binary valuation entries must be 0 or scale");
        if (kind == Kind::TwoValued && x != a && x != b)
            throw UsageError("two-valued entries must equal a or b");
    }
    if (kind == Kind::TwoValued && !(a > b && b >= 0)) throw UsageError("two-valued needs a > b >= 0");
}

void Instance::validate() const {
    if (n < 1) throw UsageError("instance needs at least one agent");
    if (m < 1) throw UsageError("instance needs at least one item");
    if (static_cast<int>(agents.size()) != n) throw UsageError("valuation count differs from n");
    for (const auto& v : agents) {
        if (v.m() != m) throw UsageError("valuation length differs from m");
        if (v.scale != scale) throw UsageError("valuations must share one scale");
        if (v.kind != kind) throw UsageError("valuations must share the instance kind");
        if (kind == Kind::TwoValued && (v.a != a || v.b != b)) throw UsageError("two-valued parameters differ");
        v.validate();
    }
}

Instance Instance::public_view() const {
    Instance out = *this;
    for (auto& v : out.agents) std::fill(v.values.begin(), v.values.end(), Value{0});
    return out;
}

Instance make_instance(Kind kind, const std::vector<std::vector<Value>>& values, Value scale, Value a, Value b) {
    Instance inst;
    inst.n = static_cast<int>(values.size());
    inst.m = values.empty() ? 0 : static_cast<int>(values.front().size());
    inst.kind = kind;
    inst.scale = scale;
    inst.a = a;
    inst.b = b;
    for (const auto& row : values) inst.agents.push_back(Valuation{kind, row, scale, a, b});
    inst.validate();
    return inst;
}

std::vector<Bundle> Allocation::bundles() const {
    std::vector<Bundle> out(n);
    for (int e = 0; e < m(); ++e) out.at(owner[e]).push_back(e);
    return out;
}

Bundle Allocation::bundle(int agent) const {
    Bundle out;
    for (int e = 0; e < m(); ++e)
        if (owner[e] == agent) out.push_back(e);
    return out;
}

Allocation Allocation::from_bundles(int n, int m, const std::vector<Bundle>& bundles) {
    if (static_cast<int>(bundles.size()) > n) throw UsageError("more bundles than agents");
    Allocation a(n, m, -1);
    for (int i = 0; i < static_cast<int>(bundles.size()); ++i)
        for (int e : bundles[i]) {
            if (e < 0 || e >= m) throw UsageError("bundle item out of range");
            if (a.owner[e] != -1) throw UsageError("bundles overlap");
            a.owner[e] = i;
        }
    for (int o : a.owner)
        if (o < 0) throw UsageError("bundles do not cover every item");
    return a;
}

Value raw_value(const Valuation& v, const Bundle& bundle) {
    Value acc = 0;
    for (int e : bundle) {
        if (e < 0 || e >= v.m()) throw UsageError("item index out of range");
        if (v.kind == Kind::UnitDemand)
            acc = std::max(acc, v.values[e]);
        else
            acc += v.values[e];
    }
    return acc;
}

Rational value_of(const Valuation& v, const Bundle& bundle) { return Rational(raw_value(v, bundle), v.scale); }

std::vector<int> top_items(const Valuation& v, int count) {
    std::vector<int> order(v.m());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return v.values[x] > v.values[y]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(count, 0))));
    std::sort(order.begin(), order.end());
    return order;
}

Valuation ud_to_binary(const Valuation& v, int n) {
    if (v.kind != Kind::UnitDemand) throw UsageError("ud_to_binary needs a unit-demand valuation");
    if (v.m() < n) throw UsageError("ud_to_binary needs m >= n");
    Valuation out{Kind::BinaryAdditive, std::vector<Value>(v.m(), 0), v.scale, 0, 0};
    for (int e : top_items(v, n)) out.values[e] = v.scale;
    return out;
}

}  // namespace fairalloc
