#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mvbm/mechanisms.hpp"
#include "mvbm/oracle.hpp"

namespace mvbm {

// An agent's strategy set: every non-empty subset of its true edges (agents
// with no edges have only the empty report), crossed with declared
// capacities 1..b_i in ecms mode. Deviation scans enumerate edge subsets by
// ascending bitmask over the agent's ascending edge list, and capacities
// ascending within each subset; this makes every "first witness" and every
// tie-break deterministic.

// FCFS policies: agent 0 reserves its top-b_0-valued connected tasks (value
// ties by ascending index), agent 1 the top of what remains, and so on.
struct FcfsResult {
    std::vector<std::vector<TaskId>> policies;  // per agent, ascending task ids

    // The union of the policies, read as a matching (policies are disjoint).
    Matching union_matching() const;
    // The union read as a declared profile (capacities truthful).
    Report as_report() const;
};

FcfsResult fcfs_policies(const Instance& inst);

struct Deviation {
    AgentId agent;
    std::vector<TaskId> edges;  // the improving declaration
    int capacity;               // declared capacity (true capacity in ems)
    Rational old_utility;
    Rational new_utility;
    Rational gain;  // strictly positive
};

struct EquilibriumVerdict {
    bool is_ne;
    std::optional<Deviation> deviation;  // set when is_ne is false
};

// Checks whether any agent has a strictly improving unilateral deviation
// from `profile` (missing declared capacities mean truthful ones). Profile
// fragments may be empty sets (FCFS policies can be); deviations range over
// the agent's strategy set plus staying put.
EquilibriumVerdict verify_nash(const Instance& inst, const Report& profile, Mechanism mech,
                               Mode mode, std::uint64_t cap = default_enumeration_cap());

struct EquilibriaSummary {
    std::uint64_t profiles_scanned = 0;
    std::uint64_t ne_count = 0;
    Rational min_ne_welfare;  // meaningful only when ne_count > 0
    Rational max_ne_welfare;
};

// Exhaustively scans every joint profile (product of all strategy sets; the
// product must not exceed `cap`). `on_ne` receives each equilibrium profile
// and its welfare, in enumeration order.
EquilibriaSummary enumerate_equilibria(
    const Instance& inst, Mechanism mech, Mode mode,
    std::uint64_t cap = default_enumeration_cap(),
    const std::function<void(const Report&, const Rational&)>& on_ne = {});

struct PoaPosResult {
    Rational optimum;
    std::uint64_t ne_count = 0;
    Rational min_ne_welfare;
    Rational max_ne_welfare;
    Rational poa;  // optimum / min NE welfare (1 when the instance has no edges)
    Rational pos;  // optimum / max NE welfare
};

PoaPosResult empirical_poa_pos(const Instance& inst, Mechanism mech, Mode mode,
                               std::uint64_t cap = default_enumeration_cap());

struct BestResponse {
    std::vector<TaskId> edges;
    int capacity;
    Rational utility;           // best achievable against `others`
    Rational truthful_utility;  // truthful report against the same `others`
    Rational gain;              // utility - truthful_utility, >= 0
};

// Exact argmax of the agent's utility over its full strategy set, with all
// other agents pinned to `others`. Ties resolve to the truthful report if it
// attains the maximum, then to the first maximizer in enumeration order
// (ascending subset bitmask, then ascending capacity).
BestResponse best_response(const Instance& inst, AgentId agent, const Report& others,
                           Mechanism mech, Mode mode,
                           std::uint64_t cap = default_enumeration_cap());

// Fixes all agents truthful and scans each agent's strategy set for a strict
// utility gain. Returns the first gain found (agents ascending, then
// enumeration order), or nullopt: the mechanism is truthful on this input.
std::optional<Deviation> check_truthfulness(const Instance& inst, Mechanism mech, Mode mode,
                                            std::uint64_t cap = default_enumeration_cap());

struct CoalitionWitness {
    std::vector<AgentId> coalition;                // ascending
    std::vector<std::vector<TaskId>> declarations;  // per member
    std::vector<int> capacities;                   // per member
    std::vector<Rational> old_utilities;           // per member
    std::vector<Rational> new_utilities;           // per member (all >=, one >)
};

// Searches joint deviations of coalitions of size 2..max_coalition (agents
// outside the coalition stay truthful) for one that leaves every member at
// least as well off and at least one strictly better. Coalitions are scanned
// by size, then lexicographically; joint strategies with the last member
// varying fastest. Single-agent manipulations are check_truthfulness's job.
std::optional<CoalitionWitness> check_group_sp(const Instance& inst, Mechanism mech, Mode mode,
                                               int max_coalition,
                                               std::uint64_t cap = default_enumeration_cap());

struct ClassificationReport {
    // Every agent's degree is at most its capacity.
    bool degree_leq_capacity = false;
    // Under the truthful bfs matching, every task has an unmatched edge to
    // an unsaturated agent (implies single-edge-hiding never helps).
    bool every_task_contested = false;
    // Grouping agents by identical (edge set, capacity): every class
    // satisfies |class| > ceil(|tasks|/capacity) + 1.
    bool class_condition = false;
};

ClassificationReport classify_truthful_inputs(const Instance& inst);

}  // namespace mvbm
