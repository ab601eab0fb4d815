#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpa/model.hpp"

namespace fpa {

struct Literal {
    int var = 0;  // 0-based
    bool negated = false;
};

struct SatFormula {
    int variables = 0;
    std::vector<std::vector<Literal>> clauses;
};

// DIMACS CNF: comment lines start with 'c', an optional "p cnf V C" header,
// clauses as 0-terminated integer lists. Every clause must have 2 or 3
// literals and every variable may occur at most 3 times.
SatFormula parse_sat(const std::string& text);
void validate_formula(const SatFormula& f);
bool satisfies(const SatFormula& f, const std::vector<bool>& assignment);

struct DeltaChain {
    Rational not_, proj, or1, or2, out;
    Rational delta;          // total unnormalised mass
    Rational eps_threshold;  // smallest of the per-gadget bounds
    std::vector<std::pair<std::string, Rational>> eps_bounds;
};

// Fills Δ, the per-gadget ε bounds and ε_threshold from the δ's.
void finish_chain(DeltaChain& chain, const Rational& delta);
// Throws Validation when a strict inequality of the δ ladder fails.
void check_ladder(const DeltaChain& chain);
DeltaChain default_deltas(const SatFormula& f);

enum class Role { InputHub, InputJ, InputK, InputL, Not, Proj, Or1, Or2, OutK, OutL };
const char* role_name(Role r);

struct RoleTag {
    Role role = Role::InputHub;
    int variable = -1;
    int clause = -1;
    int literal = -1;
};

struct ClauseGadget {
    std::vector<int> literal_bidders;  // input copy or projection bidder per literal
    std::vector<int> not_bidders;      // -1 for positive literals
    std::vector<int> proj_bidders;     // -1 for positive literals
    int or1 = -1;
    int or2 = -1;
    int out_k = -1;
    int out_l = -1;
};

struct ReductionMap {
    std::vector<RoleTag> roles;                 // per bidder
    std::vector<std::array<int, 4>> inputs;     // per variable: hub, j, k, l
    std::vector<ClauseGadget> clauses;
    DeltaChain chain;
};

struct Reduction {
    DfpaInstance instance;
    ReductionMap map;
};

// Fixed spaces of the construction.
BidSpace reduction_bids();                    // {0, 1/7, 2/7, 3/7}
std::vector<Rational> reduction_values();     // {0, 23/64, 1}
PureStrategy encoding(bool value);            // s_0 = (0,b1,b2), s_1 = (0,b2,b3)

Reduction build_auction(const SatFormula& f, const std::optional<DeltaChain>& chain = std::nullopt);
PureProfile encode_profile(const std::vector<bool>& assignment, const SatFormula& f, const ReductionMap& map);
std::optional<std::vector<bool>> extract_assignment(const PureProfile& profile, const ReductionMap& map);

// A single gadget on its own (unit δ), with the factor that turns raw
// utilities into the tabulated Δ-scaled (or Δ/δ-scaled) quantities.
enum class Gadget { Input, Not, Proj, Or, Out };
struct IsolatedGadget {
    DfpaInstance instance;
    Rational scale;
};
// Bidder order: Input (hub, j, k, l); Not (input copy i, j); Proj (NOT j, k);
// Or (i, j, l); Out (OR2 i, k, l).
IsolatedGadget isolated_gadget(Gadget g);

// --- discrete to continuous lift -------------------------------------------

struct LiftResult {
    BoxInstance instance;
    Rational delta;        // applied cube side
    Rational value_scale;  // values were multiplied by this (1 - γ')
    Rational extra_loss;   // γ' added to the projection guarantee
};

LiftResult lift_dfpa_to_cfpa(const DfpaInstance& inst, const Rational& delta);
LiftResult lift_dfpa_to_cfpa(const SymDfpaInstance& inst, const Rational& delta);

// β^d(v)(b) = |{x in [s v, s v + δ] : β^c(x) = b}| / δ per strategy slot, where
// s is the lift's value scale. `value_spaces` are the slots' value spaces.
MixedProfile project_strategy(const JumpProfile& profile, const std::vector<std::vector<Rational>>& value_spaces,
                              const LiftResult& lift);

}  // namespace fpa
