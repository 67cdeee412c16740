#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvbm/instance.hpp"
#include "mvbm/rational.hpp"

namespace mvbm {

// Default budget for every exhaustive enumeration in the library. Reads the
// MVBM_CAP_DEFAULT environment variable once (must be a positive integer),
// falling back to 100000. Enumerations whose estimated size exceeds the
// budget throw CapExceeded; nothing is ever silently sampled or truncated.
std::uint64_t default_enumeration_cap();

struct OracleResult {
    Rational optimum;
    std::vector<Matching> optimal_matchings;  // complete list of argmaxes
};

// Ground truth by direct enumeration: assigns each task, in ascending index
// order, to one of {unassigned} + its incident agents (ascending), keeping
// capacity-feasible branches. The estimated leaf count (product of per-task
// choice counts) must not exceed `cap`.
OracleResult brute_force_mvbm(const std::vector<std::vector<TaskId>>& agent_edges,
                              const std::vector<int>& capacities,
                              const std::vector<Rational>& values,
                              std::uint64_t cap = default_enumeration_cap());

// Same as brute_force_mvbm but keeps only the optimal welfare.
Rational brute_force_welfare(const std::vector<std::vector<TaskId>>& agent_edges,
                             const std::vector<int>& capacities,
                             const std::vector<Rational>& values,
                             std::uint64_t cap = default_enumeration_cap());

// Independent second route for cross-checking: enumerates, agent by agent,
// every subset of at most b_i of the agent's incident tasks, combining only
// disjoint selections. Returns the optimal welfare.
Rational brute_force_optimum_agent_major(const std::vector<std::vector<TaskId>>& agent_edges,
                                         const std::vector<int>& capacities,
                                         const std::vector<Rational>& values,
                                         std::uint64_t cap = default_enumeration_cap());

// Exhaustive small-instance space: every n in [1, n_max], m in [1, m_max],
// capacity vector in [1, b_max]^n, value vector in values^m, and every edge
// subset of the n*m grid. No symmetry reduction.
struct SweepLimits {
    int n_max = 3;
    int m_max = 3;
    int b_max = 2;
    std::vector<Rational> values = {Rational(1), Rational(1, 2), Rational(1, 4)};
};

std::uint64_t sweep_count(const SweepLimits& limits);

// Deterministic indexing: blocks ordered by n ascending then m ascending;
// within a block the index decomposes as (capacity-vector digits, value
// digits, edge bitmask), edge mask varying fastest. Agent 0 / task 0 are the
// least significant digits; edge bit for (agent i, task j) is i*m + j.
Instance sweep_instance(const SweepLimits& limits, std::uint64_t index);

void for_each_sweep_instance(const SweepLimits& limits,
                             const std::function<void(std::uint64_t, const Instance&)>& fn);

}  // namespace mvbm
