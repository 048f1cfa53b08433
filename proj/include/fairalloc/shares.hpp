#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairalloc/model.hpp"

namespace fairalloc {

struct ShareProfile {
    Rational prop;
    Rational tps;
    std::optional<Rational> mms;
    std::optional<Rational> mxs;
};

struct MmsResult {
    Rational value;
    std::vector<Bundle> partition;  // one witness partition
};

struct ShareCaps {
    int max_items = 14;
    int max_agents = 4;
    int two_agent_items = 30;
};

Rational prop_share(const Valuation& v, int n);
Rational tps(const Valuation& v, int n);
// Same as tps but removes over-proportional items in the given priority order;
// used to check that the result does not depend on that order.
Rational tps_with_order(const Valuation& v, int n, const std::vector<int>& priority);

MmsResult mms_exact(const Valuation& v, int n, const ShareCaps& caps = {});
Rational mms_binary(const Valuation& v, int n);
Rational mms_unit_demand(const Valuation& v, int n);
// Exact maximin over (a-count, b-count) bundle compositions.
Rational mms_two_valued(const Valuation& v, int n);
Value mms_two_valued_counts(int a_items, int b_items, Value a, Value b, int n);
// Class oracle when one applies, otherwise mms_exact.
Rational mms_share(const Valuation& v, int n, const ShareCaps& caps = {});

Rational mxs_exact(const Valuation& v, int n, const ShareCaps& caps = {});

ShareProfile share_profile(const Valuation& v, int n, bool with_mms, bool with_mxs);

// Caps every item above the proportional share at the TPS.
Valuation truncate_over_proportional(const Valuation& v, int n);

enum class Notion { Prop1Strict, Prop1Weak, RhoTps, Aprop, EF, EF1, EFX, EQX, MMS, RhoMms, MXS, Any };

std::string to_string(Notion n);
Notion notion_from_string(const std::string& s);

struct Verdict {
    bool pass = true;
    std::string witness;  // item or bundle evidence, human readable
};

// rho = 0 selects the default n/(2n-1).
Rational default_rho(int n);

std::vector<Verdict> check_prop1(const Instance& inst, const Allocation& alloc, bool strict);
std::vector<Verdict> check_rho_tps(const Instance& inst, const Allocation& alloc, Rational rho = 0);
std::vector<Verdict> check_envy(const Instance& inst, const Allocation& alloc, Notion notion);
std::vector<Verdict> check_share(const Instance& inst, const Allocation& alloc, Notion notion, Rational rho = 1,
                                 const ShareCaps& caps = {});
std::vector<Verdict> check_aprop(const Instance& inst, const Allocation& alloc);
std::vector<Verdict> check_notion(const Instance& inst, const Allocation& alloc, Notion notion, Rational rho = 0,
                                  const ShareCaps& caps = {});

bool all_pass(const std::vector<Verdict>& vs);
std::string verdicts_to_text(const std::vector<Verdict>& vs);

}  // namespace fairalloc
