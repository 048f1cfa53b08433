#include <sstream>

#include "fairalloc/shares.hpp"

namespace fairalloc {
namespace {

struct NotionName {
    Notion n;
    const char* name;
};
constexpr NotionName kNotions[] = {
    {Notion::Prop1Strict, "prop1"}, {Notion::Prop1Weak, "prop1_weak"}, {Notion::RhoTps, "rho_tps"},
    {Notion::Aprop, "aprop"},       {Notion::EF, "ef"},                {Notion::EF1, "ef1"},
    {Notion::EFX, "efx"},           {Notion::EQX, "eqx"},              {Notion::MMS, "mms"},
    {Notion::RhoMms, "rho_mms"},    {Notion::MXS, "mxs"},              {Notion::Any, "any"},
};

std::string str(const Rational& r) {
    std::ostringstream out;
    out << r.numerator();
    if (r.denominator() != 1) out << '/' << r.denominator();
    return out.str();
}

Bundle without(const Bundle& b, int e) {
    Bundle out;
    for (int x : b)
        if (x != e) out.push_back(x);
    return out;
}

void require_shape(const Instance& inst, const Allocation& alloc) {
    if (alloc.n != inst.n || alloc.m() != inst.m) throw UsageError("allocation shape differs from instance");
}

}  // namespace

std::string to_string(Notion n) {
    for (const auto& x : kNotions)
        if (x.n == n) return x.name;
    return "?";
}

Notion notion_from_string(const std::string& s) {
    for (const auto& x : kNotions)
        if (s == x.name) return x.n;
    throw UsageError("unknown fairness notion '" + s + "'");
}

Rational default_rho(int n) { return Rational(n, 2 * n - 1); }

std::vector<Verdict> check_prop1(const Instance& inst, const Allocation& alloc, bool strict) {
    require_shape(inst, alloc);
    auto bundles = alloc.bundles();
    std::vector<Verdict> out(inst.n);
    for (int i = 0; i < inst.n; ++i) {
        const auto& v = inst.v(i);
        Rational prop = prop_share(v, inst.n);
        Rational own = value_of(v, bundles[i]);
        if (own >= prop) continue;
        int best = -1;
        for (int e = 0; e < inst.m; ++e)
            if (alloc.owner[e] != i && (best < 0 || v.values[e] > v.values[best])) best = e;
        if (best >= 0) {
            Rational with = own + Rational(v.values[best], v.scale);
            if (strict ? with > prop : with >= prop) {
                out[i].witness = "item " + std::to_string(best);
                continue;
            }
        }
        out[i].pass = false;
        out[i].witness = "value " + str(own) + " below prop " + str(prop) + " even with the best outside item";
    }
    return out;
}

std::vector<Verdict> check_rho_tps(const Instance& inst, const Allocation& alloc, Rational rho) {
    require_shape(inst, alloc);
    if (rho == Rational(0)) rho = default_rho(inst.n);
    auto bundles = alloc.bundles();
    std::vector<Verdict> out(inst.n);
    for (int i = 0; i < inst.n; ++i) {
        Rational need = rho * tps(inst.v(i), inst.n);
        Rational own = value_of(inst.v(i), bundles[i]);
        if (own < need) out[i] = {false, "value " + str(own) + " < " + str(need)};
    }
    return out;
}

std::vector<Verdict> check_envy(const Instance& inst, const Allocation& alloc, Notion notion) {
    require_shape(inst, alloc);
    if (notion != Notion::EF && notion != Notion::EF1 && notion != Notion::EFX && notion != Notion::EQX)
        throw UsageError("check_envy handles EF, EF1, EFX and EQX only");
    auto bundles = alloc.bundles();
    std::vector<Verdict> out(inst.n);
    for (int i = 0; i < inst.n; ++i) {
        Rational own = value_of(inst.v(i), bundles[i]);
        for (int j = 0; j < inst.n && out[i].pass; ++j) {
            if (j == i) continue;
            // EQX measures the other bundle with its holder's valuation.
            const Valuation& judge = notion == Notion::EQX ? inst.v(j) : inst.v(i);
            if (own >= value_of(judge, bundles[j])) continue;
            bool ok = false;
            if (notion == Notion::EF1) {
                for (int e : bundles[j])
                    if (own >= value_of(judge, without(bundles[j], e))) {
                        ok = true;
                        break;
                    }
            } else if (notion != Notion::EF) {
                ok = true;  // vacuous for an empty bundle
                for (int e : bundles[j])
                    if (own < value_of(judge, without(bundles[j], e))) {
                        ok = false;
                        break;
                    }
            }
            if (!ok) out[i] = {false, to_string(notion) + " violated against agent " + std::to_string(j)};
        }
    }
    return out;
}

std::vector<Verdict> check_share(const Instance& inst, const Allocation& alloc, Notion notion, Rational rho,
                                 const ShareCaps& caps) {
    require_shape(inst, alloc);
    if (notion != Notion::MMS && notion != Notion::RhoMms && notion != Notion::MXS)
        throw UsageError("check_share handles MMS, RhoMms and MXS only");
    if (notion == Notion::MMS) rho = 1;
    auto bundles = alloc.bundles();
    std::vector<Verdict> out(inst.n);
    for (int i = 0; i < inst.n; ++i) {
        Rational share = notion == Notion::MXS ? mxs_exact(inst.v(i), inst.n, caps) : mms_share(inst.v(i), inst.n, caps);
        Rational own = value_of(inst.v(i), bundles[i]);
        if (own < rho * share) out[i] = {false, "value " + str(own) + " < " + str(rho * share)};
    }
    return out;
}

std::vector<Verdict> check_aprop(const Instance& inst, const Allocation& alloc) {
    auto p1 = check_prop1(inst, alloc, true);
    auto rt = check_rho_tps(inst, alloc, default_rho(inst.n));
    for (int i = 0; i < inst.n; ++i)
        if (!rt[i].pass) {
            p1[i].pass = false;
            p1[i].witness = p1[i].witness.empty() ? rt[i].witness : p1[i].witness + "; " + rt[i].witness;
        }
    return p1;
}

std::vector<Verdict> check_notion(const Instance& inst, const Allocation& alloc, Notion notion, Rational rho,
                                  const ShareCaps& caps) {
    switch (notion) {
        case Notion::Prop1Strict: return check_prop1(inst, alloc, true);
        case Notion::Prop1Weak: return check_prop1(inst, alloc, false);
        case Notion::RhoTps: return check_rho_tps(inst, alloc, rho);
        case Notion::Aprop: return check_aprop(inst, alloc);
        case Notion::EF:
        case Notion::EF1:
        case Notion::EFX:
        case Notion::EQX: return check_envy(inst, alloc, notion);
        case Notion::MMS: return check_share(inst, alloc, notion, 1, caps);
        case Notion::RhoMms: return check_share(inst, alloc, notion, rho == Rational(0) ? Rational(1) : rho, caps);
        case Notion::MXS: return check_share(inst, alloc, notion, 1, caps);
        case Notion::Any: return std::vector<Verdict>(inst.n);
    }
    return {};
}

bool all_pass(const std::vector<Verdict>& vs) {
    for (const auto& v : vs)
        if (!v.pass) return false;
    return true;
}

std::string verdicts_to_text(const std::vector<Verdict>& vs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < vs.size(); ++i)
        out << "agent " << i << ' ' << (vs[i].pass ? "pass" : "FAIL") << (vs[i].witness.empty() ? "" : " ") << vs[i].witness
            << '\n';
    return out.str();
}

}  // namespace fairalloc
