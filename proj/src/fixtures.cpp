#include "mvbm/fixtures.hpp"

#include <algorithm>
#include <unordered_set>

#include "mvbm/errors.hpp"

namespace mvbm {
namespace {

Instance make(std::vector<Rational> values, std::vector<int> capacities,
              std::vector<std::vector<TaskId>> edges) {
    Instance inst;
    inst.values = std::move(values);
    inst.capacities = std::move(capacities);
    inst.edges = std::move(edges);
    inst.validate();
    return inst;
}

// Two unit-capacity agents, one high-value task both can do plus one private
// low-value task each. Hiding the shared task strictly helps under both
// optimal mechanisms; the length-1 heuristic is immune.
Instance thm1_impossibility_instance() {
    return make({Rational(1), Rational(1, 10), Rational(1, 10)}, {1, 1}, {{0, 1}, {0, 2}});
}

// Two unit-capacity agents and tasks valued 1+eps and 1; agent 0 sees both
// tasks, agent 1 only the first. The welfare gap between the optimum and the
// length-1 heuristic (equivalently, the worst equilibrium) is (2+eps)/(1+eps).
Instance tightness_instance(const Rational& eps) {
    if (eps.sign() <= 0) throw ValidationError("epsilon must be positive");
    return make({Rational(1) + eps, Rational(1)}, {1, 1}, {{0, 1}, {0}});
}

// Three unit-capacity agents, two unit-value tasks. Agents 0 and 2 can
// jointly misreport so agent 2 gains and agent 0 is unharmed.
Instance ex1_collusion_instance() {
    return make({Rational(1), Rational(1)}, {1, 1, 1}, {{0, 1}, {1}, {0}});
}

// One capacity-2 agent seeing all four tasks (values 2^-1..2^-4) plus two
// unit-capacity rivals. Shows how declaration order and edge hiding interact.
Instance ex2_order_dependence_instance() {
    return make({Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 16)}, {2, 1, 1},
                {{0, 1, 2, 3}, {0}, {1}});
}

// Three unit-capacity agents, complete graph over tasks valued 1 and 1/2.
// Breadth-first and depth-first augmentation produce different matchings.
Instance app_ex_bfs_vs_dfs_instance() {
    return make({Rational(1), Rational(1, 2)}, {1, 1, 1}, {{0, 1}, {0, 1}, {0, 1}});
}

// Five capacity-2 agents in two groups with identical edge sets (values
// 3^-1, 3^-2, 3^-3): depth-first augmentation is manipulable here while
// breadth-first is not.
Instance app_ex_classes_instance() {
    return make({Rational(1, 3), Rational(1, 9), Rational(1, 27)}, {2, 2, 2, 2, 2},
                {{0, 1, 2}, {1, 2}, {0, 1, 2}, {0, 1, 2}, {1, 2}});
}

// Every agent's degree is at most its capacity (a class of inputs where all
// three mechanisms are truthful).
Instance degree_leq_capacity_instance(const FixtureParams& params) {
    if (params.n < 1 || params.m < 1 || params.b_max < 1) {
        throw ValidationError("family fixture requires n >= 1, m >= 1, b_max >= 1");
    }
    SplitMix64 rng(params.seed);
    const int n = params.n;
    const int m = params.m;

    std::vector<int> caps(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) caps[static_cast<size_t>(i)] = 1 + static_cast<int>(rng.below(
        static_cast<std::uint64_t>(params.b_max)));

    std::vector<Rational> values(static_cast<size_t>(m));
    std::unordered_set<long> seen;
    for (int j = 0; j < m; ++j) {
        long num;
        do {
            num = static_cast<long>(rng.below(10000)) + 1;
        } while (!seen.insert(num).second);
        values[static_cast<size_t>(j)] = Rational(num, 10000);
    }

    std::vector<std::vector<TaskId>> edges(static_cast<size_t>(n));
    std::vector<TaskId> pool(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) pool[static_cast<size_t>(j)] = j;
    for (int i = 0; i < n; ++i) {
        const int max_deg = std::min(caps[static_cast<size_t>(i)], m);
        const int deg = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_deg) + 1));
        // Partial Fisher-Yates: the first `deg` slots become the sample.
        for (int k = 0; k < deg; ++k) {
            const int r = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - k)));
            std::swap(pool[static_cast<size_t>(k)], pool[static_cast<size_t>(r)]);
        }
        auto& row = edges[static_cast<size_t>(i)];
        row.assign(pool.begin(), pool.begin() + deg);
        std::sort(row.begin(), row.end());
        std::sort(pool.begin(), pool.end());
    }
    return make(std::move(values), std::move(caps), std::move(edges));
}

// Complete bipartite graph with few enough tasks (m <= sum(b) - max(b)) that
// after the optimal matching every task still neighbours an unsaturated
// agent it is not matched to.
Instance complete_contested_instance(const FixtureParams& params) {
    if (params.n < 2 || params.b_max < 1) {
        throw ValidationError("family fixture requires n >= 2 and b_max >= 1");
    }
    SplitMix64 rng(params.seed);
    const int n = params.n;

    std::vector<int> caps(static_cast<size_t>(n));
    int total = 0, max_cap = 0;
    for (int i = 0; i < n; ++i) {
        caps[static_cast<size_t>(i)] =
            1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.b_max)));
        total += caps[static_cast<size_t>(i)];
        max_cap = std::max(max_cap, caps[static_cast<size_t>(i)]);
    }
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - max_cap)));

    std::vector<Rational> values(static_cast<size_t>(m));
    std::unordered_set<long> seen;
    for (int j = 0; j < m; ++j) {
        long num;
        do {
            num = static_cast<long>(rng.below(10000)) + 1;
        } while (!seen.insert(num).second);
        values[static_cast<size_t>(j)] = Rational(num, 10000);
    }

    std::vector<TaskId> all_tasks(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) all_tasks[static_cast<size_t>(j)] = j;
    std::vector<std::vector<TaskId>> edges(static_cast<size_t>(n), all_tasks);
    return make(std::move(values), std::move(caps), std::move(edges));
}

}  // namespace

FixtureId parse_fixture_id(std::string_view name) {
    for (FixtureId id : all_fixture_ids()) {
        if (to_string(id) == name) return id;
    }
    throw ParseError("unknown fixture id: '" + std::string(name) + "'");
}

std::string to_string(FixtureId id) {
    switch (id) {
        case FixtureId::thm1_impossibility: return "thm1_impossibility";
        case FixtureId::thm3_tightness: return "thm3_tightness";
        case FixtureId::ex1_collusion: return "ex1_collusion";
        case FixtureId::ex2_order_dependence: return "ex2_order_dependence";
        case FixtureId::thm8_poa: return "thm8_poa";
        case FixtureId::thm9_lower_bound: return "thm9_lower_bound";
        case FixtureId::app_ex_bfs_vs_dfs: return "app_ex_bfs_vs_dfs";
        case FixtureId::app_ex_classes: return "app_ex_classes";
        case FixtureId::degree_leq_capacity_family: return "degree_leq_capacity_family";
        case FixtureId::complete_contested_family: return "complete_contested_family";
    }
    throw ParseError("unknown fixture id");
}

const std::vector<FixtureId>& all_fixture_ids() {
    static const std::vector<FixtureId> ids = {
        FixtureId::thm1_impossibility,    FixtureId::thm3_tightness,
        FixtureId::ex1_collusion,         FixtureId::ex2_order_dependence,
        FixtureId::thm8_poa,              FixtureId::thm9_lower_bound,
        FixtureId::app_ex_bfs_vs_dfs,     FixtureId::app_ex_classes,
        FixtureId::degree_leq_capacity_family, FixtureId::complete_contested_family,
    };
    return ids;
}

std::string fixture_description(FixtureId id) {
    switch (id) {
        case FixtureId::thm1_impossibility:
            return "2 agents (b=1), tasks (1, 1/10, 1/10): hiding the shared top task strictly "
                   "helps under bfs/dfs; ap is immune";
        case FixtureId::thm3_tightness:
            return "2 agents (b=1), tasks (1+eps, 1): ap welfare is (1+eps), optimum (2+eps)";
        case FixtureId::ex1_collusion:
            return "3 agents (b=1), 2 unit tasks: a two-agent coalition can misreport so one "
                   "member gains and none loses under ap";
        case FixtureId::ex2_order_dependence:
            return "agent 0 (b=2) sees tasks (1/2, 1/4, 1/8, 1/16); two rivals: declaration "
                   "order and edge hiding interact";
        case FixtureId::thm8_poa:
            return "same instance as thm3_tightness: unique equilibrium welfare (1+eps), "
                   "ratio (2+eps)/(1+eps)";
        case FixtureId::thm9_lower_bound:
            return "same instance as thm3_tightness: capacity declarations do not change the "
                   "equilibrium gap";
        case FixtureId::app_ex_bfs_vs_dfs:
            return "3 agents (b=1), complete graph over tasks (1, 1/2): bfs and dfs return "
                   "different matchings";
        case FixtureId::app_ex_classes:
            return "5 agents (b=2) in two identical-edge-set groups, tasks (1/3, 1/9, 1/27): "
                   "dfs is manipulable, bfs is not";
        case FixtureId::degree_leq_capacity_family:
            return "seeded generator: every agent degree <= capacity (all mechanisms truthful)";
        case FixtureId::complete_contested_family:
            return "seeded generator: complete graph, m <= sum(b)-max(b), so every task stays "
                   "contested after matching";
    }
    throw ParseError("unknown fixture id");
}

Instance fixture(FixtureId id, const FixtureParams& params) {
    switch (id) {
        case FixtureId::thm1_impossibility: return thm1_impossibility_instance();
        case FixtureId::thm3_tightness: return tightness_instance(params.eps);
        case FixtureId::ex1_collusion: return ex1_collusion_instance();
        case FixtureId::ex2_order_dependence: return ex2_order_dependence_instance();
        case FixtureId::thm8_poa: return tightness_instance(params.eps);
        case FixtureId::thm9_lower_bound: return tightness_instance(params.eps);
        case FixtureId::app_ex_bfs_vs_dfs: return app_ex_bfs_vs_dfs_instance();
        case FixtureId::app_ex_classes: return app_ex_classes_instance();
        case FixtureId::degree_leq_capacity_family: return degree_leq_capacity_instance(params);
        case FixtureId::complete_contested_family: return complete_contested_instance(params);
    }
    throw ParseError("unknown fixture id");
}

ValueMode parse_value_mode(std::string_view name) {
    if (name == "distinct") return ValueMode::distinct;
    if (name == "with_ties") return ValueMode::with_ties;
    throw ParseError("unknown value mode: '" + std::string(name) + "'");
}

std::string to_string(ValueMode mode) {
    return mode == ValueMode::distinct ? "distinct" : "with_ties";
}

Instance random_instance(const RandomInstanceParams& params) {
    if (params.n < 1 || params.m < 1 || params.b_max < 1) {
        throw ValidationError("random_instance requires n >= 1, m >= 1, b_max >= 1");
    }
    if (params.density.sign() <= 0 || Rational(1) < params.density) {
        throw ValidationError("density must be in (0, 1]");
    }
    const long num = params.density.num_long();
    const long den = params.density.den_long();

    SplitMix64 rng(params.seed);
    const int n = params.n;
    const int m = params.m;

    std::vector<int> caps(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        caps[static_cast<size_t>(i)] =
            1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.b_max)));
    }

    std::vector<Rational> values(static_cast<size_t>(m));
    if (params.value_mode == ValueMode::distinct) {
        if (m > 10000) throw ValidationError("distinct value mode supports at most 10000 tasks");
        std::unordered_set<long> seen;
        for (int j = 0; j < m; ++j) {
            long v;
            do {
                v = static_cast<long>(rng.below(10000)) + 1;
            } while (!seen.insert(v).second);
            values[static_cast<size_t>(j)] = Rational(v, 10000);
        }
    } else {
        for (int j = 0; j < m; ++j) {
            values[static_cast<size_t>(j)] =
                Rational(static_cast<long>(rng.below(8)) + 1, 8);
        }
    }

    std::vector<std::vector<TaskId>> edges(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (rng.below(static_cast<std::uint64_t>(den)) < static_cast<std::uint64_t>(num)) {
                edges[static_cast<size_t>(i)].push_back(j);
            }
        }
    }

    Instance inst;
    inst.values = std::move(values);
    inst.capacities = std::move(caps);
    inst.edges = std::move(edges);
    inst.validate();
    return inst;
}

}  // namespace mvbm
