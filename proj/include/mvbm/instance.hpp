#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mvbm/rational.hpp"

namespace mvbm {

using AgentId = int;
using TaskId = int;

// ems: agents declare an edge subset; capacities are always the true ones.
// ecms: agents additionally declare a capacity in [1, true capacity].
enum class Mode { ems, ecms };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

// A problem instance: tasks with positive values, agents with capacities,
// and the true bipartite edge sets (per agent, ascending task ids).
// Agents with empty edge sets are legal; zero tasks or zero agents are not.
struct Instance {
    std::vector<Rational> values;            // indexed by task
    std::vector<int> capacities;             // indexed by agent
    std::vector<std::vector<TaskId>> edges;  // ascending task ids per agent

    int num_agents() const { return static_cast<int>(capacities.size()); }
    int num_tasks() const { return static_cast<int>(values.size()); }
    bool has_edge(AgentId i, TaskId j) const;

    // Throws ValidationError naming the violated invariant.
    void validate() const;

    // JSON shape: {"tasks":[{"value":"1/10"},...],
    //              "agents":[{"capacity":1,"edges":[0,2]},...]}
    // Values accept "3", "1/10", or "0.1" (decimals converted exactly).
    static Instance from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static Instance load(std::istream& in);
    static Instance load_file(const std::string& path);

    bool operator==(const Instance&) const = default;
};

// What the agents declare to a mechanism. Capacities may be left empty,
// meaning "true capacities" (the only option in ems mode).
struct Report {
    std::vector<std::vector<TaskId>> declared_edges;  // ascending task ids
    std::vector<int> declared_capacities;             // empty = truthful

    static Report truthful(const Instance& inst);
};

struct ReportViolation {
    AgentId agent;
    std::string message;
};

// Checks the bounded-by-statement rules: declared edges must be a subset of
// the agent's true edges (sorted, no duplicates); in ecms mode declared
// capacities must lie in [1, true capacity]. An empty declared edge set is
// accepted (an agent may effectively withdraw), though deviation scans never
// generate it for agents that have edges.
std::vector<ReportViolation> validate_report(const Instance& inst, const Report& report,
                                             Mode mode);

// A b-matching as a set of (agent, task) pairs, kept sorted.
struct Matching {
    std::vector<std::pair<AgentId, TaskId>> pairs;

    void normalize();  // sort + reject duplicates
    bool empty() const { return pairs.empty(); }

    // JSON shape: {"pairs":[[agent,task],...]}
    static Matching from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    bool operator==(const Matching&) const = default;
};

struct UtilityVector {
    std::vector<Rational> per_agent;
    Rational total;
};

// Throws ValidationError if the matching is not a valid b-matching over the
// instance's true edges (out-of-range ids, fabricated edge, duplicate task,
// capacity exceeded).
void validate_matching(const Instance& inst, const Matching& mu);

// Per-agent utility = sum of values of tasks matched to the agent; total is
// the social welfare. Validates the matching first.
UtilityVector utilities(const Instance& inst, const Matching& mu);

Rational matching_welfare(const Instance& inst, const Matching& mu);

}  // namespace mvbm
