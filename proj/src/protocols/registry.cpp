#include "internal.hpp"

namespace fairalloc {
namespace {

using namespace detail;

SoundnessDomain domain(Family f, int n_lo, int n_hi, int m_lo, int m_hi, FamilyParams params = {}) {
    SoundnessDomain d;
    d.family = f;
    d.n_min = n_lo, d.n_max = n_hi, d.m_min = m_lo, d.m_max = m_hi;
    d.params = std::move(params);
    return d;
}

SoundnessDomain per_agent(Family f, int n_lo, int n_hi, int per_lo, int per_hi) {
    SoundnessDomain d = domain(f, n_lo, n_hi, 1, 1);
    d.m_per_n_min = per_lo, d.m_per_n_max = per_hi;
    return d;
}

std::vector<ProtocolSpec> build_registry() {
    std::vector<ProtocolSpec> r;
    auto add = [&](std::string id, std::string summary, Notion notion, ProtocolFn fn, SoundnessDomain d,
                   RunOptions defaults = {}) {
        r.push_back(ProtocolSpec{std::move(id), std::move(summary), notion, std::move(fn), std::move(d), defaults});
    };
    auto ud2_variant = [](std::string variant) {
        return [variant](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return ud2(p, ch, crs, variant); };
    };
    const auto ud_pair = domain(Family::UdRandom, 2, 2, 2, 32);
    add("ud2-naive", "two unit-demand agents, both send their two top items", Notion::MMS, ud2_variant("naive"), ud_pair);
    add("ud2-announce", "two unit-demand agents, agent 0 names one item", Notion::MMS, ud2_variant("announce"), ud_pair);
    add("ud2-bitsplit", "two unit-demand agents, split on a differing name bit", Notion::MMS, ud2_variant("bitsplit"), ud_pair);
    add("ud2-rand", "two unit-demand agents, split on random names", Notion::MMS, ud2_variant("randomized"), ud_pair);
    add("identical-ud", "identical unit-demand agents, random bipartition queries", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return identical_ud(p, ch, crs); },
        per_agent(Family::UdIdentical, 1, 8, 1, 4));
    add("ud-det", "unit-demand MMS by swaps and bit splits", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return ud_det(p, ch, crs); },
        per_agent(Family::UdRandom, 1, 8, 2, 4));
    add("rud", "randomized unit-demand MMS with auxiliary bundles", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return rud(p, ch, crs); },
        per_agent(Family::UdRandom, 1, 8, 2, 4));
    add("ud-ef1-rr", "unit-demand EF1 by one round of picks", Notion::EF1,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions& o) { return ud_ef1(p, ch, crs, false, o); },
        domain(Family::UdRandom, 1, 6, 1, 30));
    add("ud-ef1-bundled", "unit-demand EF1 over n^3 random bundles", Notion::EF1,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions& o) { return ud_ef1(p, ch, crs, true, o); },
        domain(Family::UdRandom, 1, 3, 1, 64));
    add("binary3p", "binary MMS in three phases", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return binary3p(p, ch, crs); },
        domain(Family::BinaryRandom, 1, 8, 1, 40));
    add("two-valued", "two-valued MMS from reported high-item counts", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return two_valued(p, ch, crs); },
        domain(Family::TwoValuedRandom, 2, 3, 2, 12));
    add("prop1-det", "Prop1 by deterministic median cuts", Notion::Prop1Strict,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return prop1(p, ch, crs, false); },
        domain(Family::AdditiveRandom, 1, 8, 1, 32));
    add("prop1-rand", "Prop1 by randomized median selection", Notion::Prop1Strict,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return prop1(p, ch, crs, true); },
        domain(Family::AdditiveRandom, 1, 8, 1, 32));
    add("tps2p", "rho-TPS by single-item grabs then median cuts", Notion::RhoTps,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return tps2p(p, ch, crs); },
        domain(Family::AdditiveRandom, 1, 6, 1, 32));
    add("aprop-det", "semi-contiguous Aprop, deterministic medians", Notion::Aprop,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return aprop(p, ch, crs, false); },
        domain(Family::AdditiveRandom, 1, 8, 1, 32));
    add("aprop-rand", "semi-contiguous Aprop, randomized medians", Notion::Aprop,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return aprop(p, ch, crs, true); },
        domain(Family::AdditiveRandom, 1, 8, 1, 32));
    RunOptions small_bundles;
    small_bundles.bundle_count = 64;
    add("tps-bundle", "rho-TPS over random bundles", Notion::RhoTps,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions& o) { return tps_bundle(p, ch, crs, o); },
        domain(Family::AdditiveRandom, 2, 3, 256, 256), small_bundles);
    add("cut-choose", "two additive agents, cut and choose", Notion::MMS,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return cut_choose(p, ch, crs); },
        domain(Family::AdditiveRandom, 2, 2, 1, 12));
    add("round-robin", "additive EF1 by round robin picks", Notion::EF1,
        [](const Public& p, Channel& ch, const Crs& crs, const RunOptions&) { return round_robin(p, ch, crs); },
        domain(Family::AdditiveRandom, 1, 6, 1, 30));
    return r;
}

void finish(Outcome& out, const Public& pub) {
    if (out.allocation.n != pub.n || out.allocation.m() != pub.m)
        throw ProtocolFailure("protocol returned an allocation of the wrong shape");
    for (int o : out.allocation.owner)
        if (o < 0 || o >= pub.n) throw ProtocolFailure("protocol left an item unallocated");
    if (out.semi) out.semi->validate(pub.m);
}

}  // namespace

const std::vector<ProtocolSpec>& protocol_registry() {
    static const std::vector<ProtocolSpec> registry = build_registry();
    return registry;
}

const ProtocolSpec& find_protocol(const std::string& id) {
    for (const auto& spec : protocol_registry())
        if (spec.id == id) return spec;
    throw UsageError("unknown protocol '" + id + "'");
}

Instance sample_in_domain(const ProtocolSpec& spec, std::uint64_t seed) {
    const auto& d = spec.domain;
    Stream rng(derive_seed(seed, "domain"));
    int n = static_cast<int>(rng.between(d.n_min, d.n_max));
    int m = d.m_per_n_min > 0 ? static_cast<int>(rng.between(static_cast<std::int64_t>(d.m_per_n_min) * n,
                                                             static_cast<std::int64_t>(d.m_per_n_max) * n))
                              : static_cast<int>(rng.between(d.m_min, d.m_max));
    return gen_instance(d.family, n, m, d.params, seed);
}

void check_preconditions(const ProtocolSpec& spec, const Instance& inst) {
    if (spec.id == "identical-ud")
        for (const auto& v : inst.agents)
            if (v.values != inst.agents[0].values) throw UsageError("identical-ud needs identical valuations");
}

Outcome run_protocol(const ProtocolSpec& spec, const Instance& inst, const Crs& crs, const RunOptions& opts) {
    inst.validate();
    check_preconditions(spec, inst);
    Channel ch = Channel::live(inst);
    const Public pub = public_of(inst);
    Outcome out = spec.run(pub, ch, crs, opts);
    out.transcript = ch.take();
    finish(out, pub);
    return out;
}

Outcome run_protocol(const std::string& id, const Instance& inst, const Crs& crs, const RunOptions& opts) {
    return run_protocol(find_protocol(id), inst, crs, opts);
}

Outcome replay_protocol(const std::string& id, const Public& pub, const Transcript& tape, const Crs& crs,
                        const RunOptions& opts) {
    const ProtocolSpec& spec = find_protocol(id);
    Channel ch = Channel::replay(tape);
    Outcome out = spec.run(pub, ch, crs, opts);
    if (!ch.exhausted()) throw ProtocolFailure("replay finished with unread transcript entries");
    out.transcript = ch.take();
    finish(out, pub);
    return out;
}

}  // namespace fairalloc
