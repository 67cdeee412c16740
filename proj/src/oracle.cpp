#include "mvbm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <string>

#include "mvbm/errors.hpp"

namespace mvbm {

std::uint64_t default_enumeration_cap() {
    static const std::uint64_t cached = [] {
        const char* env = std::getenv("MVBM_CAP_DEFAULT");
        if (env == nullptr || *env == '\0') return std::uint64_t{100000};
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) {
            throw ParseError("MVBM_CAP_DEFAULT must be a positive integer");
        }
        return std::uint64_t{v};
    }();
    return cached;
}

namespace {

// a*b with saturation, to keep cap estimates overflow-safe.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

struct TaskMajorSearch {
    const std::vector<std::vector<AgentId>>& task_agents;
    const std::vector<Rational>& values;
    std::vector<int> load;
    const std::vector<int>& caps;
    std::vector<AgentId> assigned;  // per task, -1 = unassigned
    Rational current;
    Rational best;
    bool keep_matchings;
    std::vector<Matching>* out;

    void record() {
        if (current > best) {
            best = current;
            if (keep_matchings) out->clear();
        }
        if (keep_matchings && current == best) {
            Matching mu;
            for (size_t t = 0; t < assigned.size(); ++t) {
                if (assigned[t] != -1) mu.pairs.emplace_back(assigned[t], static_cast<TaskId>(t));
            }
            mu.normalize();
            out->push_back(std::move(mu));
        }
    }

    void visit(size_t t) {
        if (t == task_agents.size()) {
            record();
            return;
        }
        assigned[t] = -1;
        visit(t + 1);
        for (AgentId a : task_agents[t]) {
            if (load[static_cast<size_t>(a)] >= caps[static_cast<size_t>(a)]) continue;
            ++load[static_cast<size_t>(a)];
            assigned[t] = a;
            current += values[t];
            visit(t + 1);
            current -= values[t];
            assigned[t] = -1;
            --load[static_cast<size_t>(a)];
        }
    }
};

std::vector<std::vector<AgentId>> build_task_agents(
    const std::vector<std::vector<TaskId>>& agent_edges, size_t m) {
    std::vector<std::vector<AgentId>> task_agents(m);
    for (size_t i = 0; i < agent_edges.size(); ++i) {
        for (TaskId t : agent_edges[i]) {
            task_agents[static_cast<size_t>(t)].push_back(static_cast<AgentId>(i));
        }
    }
    return task_agents;
}

OracleResult run_task_major(const std::vector<std::vector<TaskId>>& agent_edges,
                            const std::vector<int>& capacities,
                            const std::vector<Rational>& values, std::uint64_t cap,
                            bool keep_matchings) {
    auto task_agents = build_task_agents(agent_edges, values.size());
    std::uint64_t leaves = 1;
    for (const auto& ta : task_agents) leaves = sat_mul(leaves, ta.size() + 1);
    if (leaves > cap) {
        throw CapExceeded("brute-force search space " + std::to_string(leaves) +
                          " exceeds cap " + std::to_string(cap));
    }
    OracleResult result;
    TaskMajorSearch search{task_agents,
                           values,
                           std::vector<int>(capacities.size(), 0),
                           capacities,
                           std::vector<AgentId>(values.size(), -1),
                           Rational(0),
                           Rational(-1),
                           keep_matchings,
                           &result.optimal_matchings};
    search.visit(0);
    result.optimum = search.best;
    return result;
}

}  // namespace

OracleResult brute_force_mvbm(const std::vector<std::vector<TaskId>>& agent_edges,
                              const std::vector<int>& capacities,
                              const std::vector<Rational>& values, std::uint64_t cap) {
    return run_task_major(agent_edges, capacities, values, cap, true);
}

Rational brute_force_welfare(const std::vector<std::vector<TaskId>>& agent_edges,
                             const std::vector<int>& capacities,
                             const std::vector<Rational>& values, std::uint64_t cap) {
    return run_task_major(agent_edges, capacities, values, cap, false).optimum;
}

namespace {

struct AgentMajorSearch {
    const std::vector<std::vector<TaskId>>& agent_edges;
    const std::vector<int>& caps;
    const std::vector<Rational>& values;
    std::vector<char> used;
    Rational current;
    Rational best;

    void visit(size_t i) {
        if (i == agent_edges.size()) {
            if (current > best) best = current;
            return;
        }
        const auto& row = agent_edges[i];
        const int d = static_cast<int>(row.size());
        const std::uint64_t full = (std::uint64_t{1} << d) - 1;  // d < 63, checked by caller
        for (std::uint64_t mask = 0; mask <= full; ++mask) {
            if (std::popcount(mask) > caps[i]) continue;
            bool ok = true;
            for (int k = 0; k < d; ++k) {
                if ((mask >> k) & 1) {
                    if (used[static_cast<size_t>(row[static_cast<size_t>(k)])]) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            for (int k = 0; k < d; ++k) {
                if ((mask >> k) & 1) {
                    used[static_cast<size_t>(row[static_cast<size_t>(k)])] = 1;
                    current += values[static_cast<size_t>(row[static_cast<size_t>(k)])];
                }
            }
            visit(i + 1);
            for (int k = 0; k < d; ++k) {
                if ((mask >> k) & 1) {
                    used[static_cast<size_t>(row[static_cast<size_t>(k)])] = 0;
                    current -= values[static_cast<size_t>(row[static_cast<size_t>(k)])];
                }
            }
        }
    }
};

}  // namespace

Rational brute_force_optimum_agent_major(const std::vector<std::vector<TaskId>>& agent_edges,
                                         const std::vector<int>& capacities,
                                         const std::vector<Rational>& values,
                                         std::uint64_t cap) {
    std::uint64_t combos = 1;
    for (const auto& row : agent_edges) {
        if (row.size() >= 63) throw CapExceeded("agent degree too large for subset enumeration");
        combos = sat_mul(combos, std::uint64_t{1} << row.size());
    }
    if (combos > cap) {
        throw CapExceeded("agent-major search space " + std::to_string(combos) +
                          " exceeds cap " + std::to_string(cap));
    }
    AgentMajorSearch search{agent_edges, capacities, values,
                            std::vector<char>(values.size(), 0), Rational(0), Rational(-1)};
    search.visit(0);
    return search.best;
}

namespace {

void check_limits(const SweepLimits& limits) {
    if (limits.n_max < 0 || limits.m_max < 0 || limits.b_max < 1) {
        throw ValidationError("sweep limits must have n_max, m_max >= 0 and b_max >= 1");
    }
    if (limits.n_max > 4 || limits.m_max > 4) {
        throw ValidationError("sweep limits beyond 4x4 are not supported (space explodes)");
    }
    if (limits.values.empty()) throw ValidationError("sweep needs a non-empty value set");
    for (const auto& v : limits.values) {
        if (v.sign() <= 0) throw ValidationError("sweep values must be positive");
    }
}

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

std::uint64_t block_size(const SweepLimits& limits, int n, int m) {
    return sat_mul(sat_mul(ipow(static_cast<std::uint64_t>(limits.b_max), n),
                           ipow(limits.values.size(), m)),
                   ipow(2, n * m));
}

Instance block_instance(const SweepLimits& limits, int n, int m, std::uint64_t offset) {
    const std::uint64_t edge_space = ipow(2, n * m);
    const std::uint64_t value_space = ipow(limits.values.size(), m);
    std::uint64_t e = offset % edge_space;
    offset /= edge_space;
    std::uint64_t v = offset % value_space;
    std::uint64_t c = offset / value_space;

    Instance inst;
    inst.values.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        inst.values.push_back(limits.values[v % limits.values.size()]);
        v /= limits.values.size();
    }
    inst.capacities.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        inst.capacities.push_back(1 + static_cast<int>(c % static_cast<std::uint64_t>(limits.b_max)));
        c /= static_cast<std::uint64_t>(limits.b_max);
    }
    inst.edges.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if ((e >> (i * m + j)) & 1) inst.edges[static_cast<size_t>(i)].push_back(j);
        }
    }
    return inst;
}

}  // namespace

std::uint64_t sweep_count(const SweepLimits& limits) {
    check_limits(limits);
    std::uint64_t total = 0;
    for (int n = 1; n <= limits.n_max; ++n) {
        for (int m = 1; m <= limits.m_max; ++m) {
            total += block_size(limits, n, m);
        }
    }
    return total;
}

Instance sweep_instance(const SweepLimits& limits, std::uint64_t index) {
    check_limits(limits);
    for (int n = 1; n <= limits.n_max; ++n) {
        for (int m = 1; m <= limits.m_max; ++m) {
            std::uint64_t size = block_size(limits, n, m);
            if (index < size) return block_instance(limits, n, m, index);
            index -= size;
        }
    }
    throw ValidationError("sweep index out of range");
}

void for_each_sweep_instance(const SweepLimits& limits,
                             const std::function<void(std::uint64_t, const Instance&)>& fn) {
    check_limits(limits);
    std::uint64_t index = 0;
    for (int n = 1; n <= limits.n_max; ++n) {
        for (int m = 1; m <= limits.m_max; ++m) {
            const std::uint64_t size = block_size(limits, n, m);
            for (std::uint64_t off = 0; off < size; ++off, ++index) {
                fn(index, block_instance(limits, n, m, off));
            }
        }
    }
}

}  // namespace mvbm
