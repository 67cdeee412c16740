#pragma once

#include <optional>
#include <string>

#include "mvbm/engine.hpp"
#include "mvbm/instance.hpp"

namespace mvbm {

// bfs / dfs: run the full optimal algorithm on the declared graph.
// ap: the length-1-only approximation (truthful, ratio 2).
enum class Mechanism { bfs, dfs, ap };

Mechanism parse_mechanism(const std::string& text);
std::string to_string(Mechanism mech);
SearchKind search_kind(Mechanism mech);

struct Outcome {
    Matching matching;
    UtilityVector utils;  // computed from the instance's true task values
};

// Runs a mechanism on the agents' declarations. The report must pass
// validate_report for the given mode (throws ValidationError otherwise).
// Effective capacities are the true ones in ems mode; in ecms mode the
// declared ones (true when the report leaves them empty).
Outcome run_mechanism(const Instance& inst, const Report& report, Mode mode, Mechanism mech);

Outcome run_truthful(const Instance& inst, Mechanism mech);

struct EdgeHideWitness {
    AgentId agent;
    TaskId hidden_task;
    Rational truthful_utility;
    Rational new_utility;
    Rational gain;  // new_utility - truthful_utility, strictly positive
};

// Scans agents in ascending index and, per agent, hidden edges in ascending
// task index; returns the first single-edge hide with a strictly positive
// exact utility gain, or nullopt if no single hidden edge helps anyone.
std::optional<EdgeHideWitness> best_single_edge_hide(const Instance& inst, Mechanism mech);

}  // namespace mvbm
