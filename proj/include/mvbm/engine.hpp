#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mvbm/instance.hpp"
#include "mvbm/rational.hpp"

namespace mvbm {

// bfs / dfs: full augmenting-path search (both yield maximum-welfare
// b-matchings, but generally different ones). approx_len1: only length-1
// paths are admitted (first unsaturated adjacent agent), giving the
// 2-approximation.
enum class SearchKind { bfs, dfs, approx_len1 };

// An augmenting path, stored as the edges it adds to the matching:
// hops[r] = (t_r, a_r). The path starts at the unmatched task t_0,
// alternates with the matched edges (a_r, t_{r+1}) that get removed, and
// ends at the unsaturated agent a_k. Interior agents are saturated.
struct AugmentingPath {
    std::vector<std::pair<TaskId, AgentId>> hops;
};

// Deterministic processing order: decreasing value, ties by ascending index.
std::vector<TaskId> task_order(const std::vector<Rational>& values);

// Reusable solver with preallocated scratch. Exploration order is fixed:
// at a task, incident agents are tried in ascending index; at a saturated
// agent, its matched tasks are tried in ascending index. BFS terminates at
// the first unsaturated agent it touches (shortest path under that order);
// DFS fully explores each agent's subtree before the task's next agent.
class MatchingEngine {
public:
    // Load the declared graph, effective capacities, and a starting
    // matching (`start` must be a valid b-matching of the declared graph;
    // that is the caller's responsibility here).
    void set_problem(const std::vector<std::vector<TaskId>>& declared_edges,
                     const std::vector<int>& capacities, int num_tasks,
                     const Matching& start = {});

    // Augmenting-path search from an unmatched task. On success the path is
    // available via last_path() until the next call.
    bool search(TaskId start, SearchKind kind);
    const std::vector<std::pair<TaskId, AgentId>>& last_path() const { return path_; }
    void apply_last_path();

    // Full run: for each task in `order`, search and apply if possible.
    void solve(std::span<const TaskId> order, SearchKind kind);

    // For each task, its matched agent or -1.
    const std::vector<int>& matched_agent() const { return matched_agent_; }
    Matching matching() const;

private:
    bool dfs_visit(TaskId t);

    int n_ = 0;
    int m_ = 0;
    const int* caps_ = nullptr;
    std::vector<int> matched_agent_;
    std::vector<int> load_;
    std::vector<std::vector<TaskId>> agent_tasks_;  // ascending, per agent
    std::vector<int> adj_start_;                    // CSR over tasks
    std::vector<AgentId> adj_;
    std::vector<int> adj_cursor_;
    std::vector<int> agent_seen_;
    std::vector<int> task_seen_;
    int stamp_ = 0;
    std::vector<TaskId> queue_;
    std::vector<TaskId> came_from_task_;
    std::vector<AgentId> via_agent_;
    std::vector<std::pair<TaskId, AgentId>> path_;
};

// One-shot convenience wrapper: runs the full algorithm on the given graph.
Matching solve_matching(const std::vector<std::vector<TaskId>>& agent_edges,
                        const std::vector<int>& capacities,
                        const std::vector<Rational>& values, SearchKind kind);

// Search from `task` (which must be unmatched in `current`; throws
// ValidationError otherwise). Returns the path the given search kind finds,
// or nullopt if none exists.
std::optional<AugmentingPath> find_augmenting_path(
    TaskId task, const Matching& current,
    const std::vector<std::vector<TaskId>>& agent_edges,
    const std::vector<int>& capacities, int num_tasks, SearchKind kind);

// Symmetric difference: removes the matched edges along the path and adds
// the hop edges. Throws ValidationError if the path is not augmenting with
// respect to `current` (wrong alternation, interior agent unsaturated,
// terminal agent saturated, or non-simple).
Matching apply_path(const Matching& current, const AugmentingPath& path,
                    const std::vector<int>& capacities);

}  // namespace mvbm
