#include "mvbm/strategy.hpp"

#include <algorithm>
#include <string>

#include "mvbm/errors.hpp"

namespace mvbm {
namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (b > UINT64_MAX - a) ? UINT64_MAX : a + b;
}

struct StrategyCode {
    std::uint64_t mask;
    int cap;
};

// Holds one mutable declared profile and a reusable engine, so deviation
// scans can flip a single agent's strategy and re-run without reallocating.
class ProfileEvaluator {
public:
    ProfileEvaluator(const Instance& inst, Mechanism mech, Mode mode)
        : inst_(inst),
          kind_(search_kind(mech)),
          mode_(mode),
          order_(task_order(inst.values)),
          declared_(inst.edges),
          caps_(inst.capacities) {}

    const Instance& instance() const { return inst_; }
    Mode mode() const { return mode_; }

    int degree(AgentId i) const { return static_cast<int>(inst_.edges[static_cast<size_t>(i)].size()); }

    std::uint64_t strategy_count(AgentId i) const {
        const int d = degree(i);
        if (d == 0) return 1;
        if (d > 62) throw CapExceeded("agent degree too large for strategy enumeration");
        const std::uint64_t edge_choices = (std::uint64_t{1} << d) - 1;
        const std::uint64_t cap_choices =
            mode_ == Mode::ecms ? static_cast<std::uint64_t>(inst_.capacities[static_cast<size_t>(i)]) : 1;
        return sat_mul(edge_choices, cap_choices);
    }

    // Strategy index -> (edge bitmask over the agent's true edge list,
    // declared capacity). Subset bitmask ascending, capacity fastest.
    StrategyCode decode(AgentId i, std::uint64_t s) const {
        const int b = inst_.capacities[static_cast<size_t>(i)];
        if (degree(i) == 0) return {0, b};
        if (mode_ == Mode::ems) return {s + 1, b};
        const auto ub = static_cast<std::uint64_t>(b);
        return {s / ub + 1, static_cast<int>(s % ub) + 1};
    }

    StrategyCode truthful_code(AgentId i) const {
        const int d = degree(i);
        const std::uint64_t mask = d == 0 ? 0 : (std::uint64_t{1} << d) - 1;
        return {mask, inst_.capacities[static_cast<size_t>(i)]};
    }

    void apply(AgentId i, const StrategyCode& code) {
        auto& row = declared_[static_cast<size_t>(i)];
        row.clear();
        const auto& true_row = inst_.edges[static_cast<size_t>(i)];
        for (size_t k = 0; k < true_row.size(); ++k) {
            if ((code.mask >> k) & 1) row.push_back(true_row[k]);
        }
        caps_[static_cast<size_t>(i)] = code.cap;
    }

    void apply_index(AgentId i, std::uint64_t s) { apply(i, decode(i, s)); }
    void set_truthful(AgentId i) { apply(i, truthful_code(i)); }

    void set_fragment(AgentId i, const std::vector<TaskId>& edges, int cap) {
        declared_[static_cast<size_t>(i)] = edges;
        caps_[static_cast<size_t>(i)] = cap;
    }

    void run() {
        engine_.set_problem(declared_, caps_, inst_.num_tasks());
        engine_.solve(order_, kind_);
    }

    void agent_utility(AgentId i, Rational& out) const {
        out = zero_;
        const auto& ma = engine_.matched_agent();
        for (int t = 0; t < inst_.num_tasks(); ++t) {
            if (ma[static_cast<size_t>(t)] == i) out += inst_.values[static_cast<size_t>(t)];
        }
    }

    void welfare(Rational& out) const {
        out = zero_;
        const auto& ma = engine_.matched_agent();
        for (int t = 0; t < inst_.num_tasks(); ++t) {
            if (ma[static_cast<size_t>(t)] != -1) out += inst_.values[static_cast<size_t>(t)];
        }
    }

    const std::vector<std::vector<TaskId>>& declared() const { return declared_; }
    const std::vector<int>& caps() const { return caps_; }
    std::vector<TaskId> decoded_edges(AgentId i, std::uint64_t mask) const {
        std::vector<TaskId> out;
        const auto& true_row = inst_.edges[static_cast<size_t>(i)];
        for (size_t k = 0; k < true_row.size(); ++k) {
            if ((mask >> k) & 1) out.push_back(true_row[k]);
        }
        return out;
    }

private:
    const Instance& inst_;
    SearchKind kind_;
    Mode mode_;
    std::vector<TaskId> order_;
    std::vector<std::vector<TaskId>> declared_;
    std::vector<int> caps_;
    MatchingEngine engine_;
    Rational zero_;
};

std::vector<int> effective_capacities(const Instance& inst, const Report& profile, Mode mode) {
    if (mode == Mode::ecms && !profile.declared_capacities.empty()) {
        return profile.declared_capacities;
    }
    return inst.capacities;
}

void require_valid_profile(const Instance& inst, const Report& profile, Mode mode) {
    auto violations = validate_report(inst, profile, mode);
    if (!violations.empty()) {
        throw ValidationError("invalid profile (agent " + std::to_string(violations[0].agent) +
                              "): " + violations[0].message);
    }
}

// Bitmask of `row` relative to the agent's true edge list (row must be a
// subset; the caller validated that).
std::uint64_t fragment_mask(const std::vector<TaskId>& true_row, const std::vector<TaskId>& row) {
    std::uint64_t mask = 0;
    size_t k = 0;
    for (TaskId t : row) {
        while (k < true_row.size() && true_row[k] < t) ++k;
        mask |= std::uint64_t{1} << k;
        ++k;
    }
    return mask;
}

}  // namespace

FcfsResult fcfs_policies(const Instance& inst) {
    FcfsResult out;
    out.policies.resize(static_cast<size_t>(inst.num_agents()));
    const auto order = task_order(inst.values);
    std::vector<char> remaining(static_cast<size_t>(inst.num_tasks()), 1);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        auto& policy = out.policies[static_cast<size_t>(i)];
        int want = inst.capacities[static_cast<size_t>(i)];
        for (TaskId t : order) {
            if (want == 0) break;
            if (remaining[static_cast<size_t>(t)] && inst.has_edge(i, t)) {
                policy.push_back(t);
                remaining[static_cast<size_t>(t)] = 0;
                --want;
            }
        }
        std::sort(policy.begin(), policy.end());
    }
    return out;
}

Matching FcfsResult::union_matching() const {
    Matching mu;
    for (size_t i = 0; i < policies.size(); ++i) {
        for (TaskId t : policies[i]) mu.pairs.emplace_back(static_cast<AgentId>(i), t);
    }
    mu.normalize();
    return mu;
}

Report FcfsResult::as_report() const {
    Report r;
    r.declared_edges = policies;
    return r;
}

EquilibriumVerdict verify_nash(const Instance& inst, const Report& profile, Mechanism mech,
                               Mode mode, std::uint64_t cap) {
    require_valid_profile(inst, profile, mode);
    ProfileEvaluator ev(inst, mech, mode);
    const int n = inst.num_agents();

    std::uint64_t work = 0;
    for (AgentId i = 0; i < n; ++i) work = sat_add(work, ev.strategy_count(i));
    if (work > cap) {
        throw CapExceeded("deviation scan size " + std::to_string(work) + " exceeds cap " +
                          std::to_string(cap));
    }

    const auto caps = effective_capacities(inst, profile, mode);
    for (AgentId i = 0; i < n; ++i) {
        ev.set_fragment(i, profile.declared_edges[static_cast<size_t>(i)],
                        caps[static_cast<size_t>(i)]);
    }
    ev.run();
    std::vector<Rational> current(static_cast<size_t>(n));
    for (AgentId i = 0; i < n; ++i) ev.agent_utility(i, current[static_cast<size_t>(i)]);

    Rational u_dev;
    for (AgentId i = 0; i < n; ++i) {
        const std::uint64_t count = ev.strategy_count(i);
        const std::uint64_t cur_mask = fragment_mask(inst.edges[static_cast<size_t>(i)],
                                                     profile.declared_edges[static_cast<size_t>(i)]);
        const int cur_cap = caps[static_cast<size_t>(i)];
        for (std::uint64_t s = 0; s < count; ++s) {
            const StrategyCode code = ev.decode(i, s);
            if (code.mask == cur_mask && code.cap == cur_cap) continue;
            ev.apply(i, code);
            ev.run();
            ev.agent_utility(i, u_dev);
            if (current[static_cast<size_t>(i)] < u_dev) {
                Deviation dev{i,
                              ev.decoded_edges(i, code.mask),
                              code.cap,
                              current[static_cast<size_t>(i)],
                              u_dev,
                              u_dev - current[static_cast<size_t>(i)]};
                return {false, std::move(dev)};
            }
        }
        ev.set_fragment(i, profile.declared_edges[static_cast<size_t>(i)],
                        caps[static_cast<size_t>(i)]);
    }
    return {true, std::nullopt};
}

EquilibriaSummary enumerate_equilibria(
    const Instance& inst, Mechanism mech, Mode mode, std::uint64_t cap,
    const std::function<void(const Report&, const Rational&)>& on_ne) {
    ProfileEvaluator ev(inst, mech, mode);
    const int n = inst.num_agents();

    std::vector<std::uint64_t> counts(static_cast<size_t>(n));
    std::uint64_t total = 1;
    for (AgentId i = 0; i < n; ++i) {
        counts[static_cast<size_t>(i)] = ev.strategy_count(i);
        total = sat_mul(total, counts[static_cast<size_t>(i)]);
    }
    if (total > cap) {
        throw CapExceeded("profile space " + std::to_string(total) + " exceeds cap " +
                          std::to_string(cap));
    }

    std::vector<std::uint64_t> s(static_cast<size_t>(n), 0);
    for (AgentId i = 0; i < n; ++i) ev.apply_index(i, 0);

    EquilibriaSummary summary;
    std::vector<Rational> us(static_cast<size_t>(n));
    Rational u_dev, w;

    for (;;) {
        ev.run();
        ++summary.profiles_scanned;
        for (AgentId i = 0; i < n; ++i) ev.agent_utility(i, us[static_cast<size_t>(i)]);

        bool is_ne = true;
        for (AgentId i = 0; i < n && is_ne; ++i) {
            const std::uint64_t count = counts[static_cast<size_t>(i)];
            if (count == 1) continue;
            const std::uint64_t cur = s[static_cast<size_t>(i)];
            for (std::uint64_t alt = 0; alt < count; ++alt) {
                if (alt == cur) continue;
                ev.apply_index(i, alt);
                ev.run();
                ev.agent_utility(i, u_dev);
                if (us[static_cast<size_t>(i)] < u_dev) {
                    is_ne = false;
                    break;
                }
            }
            ev.apply_index(i, cur);
        }

        if (is_ne) {
            // Re-run so the engine state matches the profile again (the
            // deviation scan above clobbered it).
            ev.run();
            ev.welfare(w);
            if (summary.ne_count == 0) {
                summary.min_ne_welfare = w;
                summary.max_ne_welfare = w;
            } else {
                if (w < summary.min_ne_welfare) summary.min_ne_welfare = w;
                if (summary.max_ne_welfare < w) summary.max_ne_welfare = w;
            }
            ++summary.ne_count;
            if (on_ne) {
                Report r;
                r.declared_edges = ev.declared();
                if (mode == Mode::ecms) r.declared_capacities = ev.caps();
                on_ne(r, w);
            }
        }

        int k = n - 1;
        while (k >= 0) {
            ++s[static_cast<size_t>(k)];
            if (s[static_cast<size_t>(k)] < counts[static_cast<size_t>(k)]) {
                ev.apply_index(k, s[static_cast<size_t>(k)]);
                break;
            }
            s[static_cast<size_t>(k)] = 0;
            ev.apply_index(k, 0);
            --k;
        }
        if (k < 0) break;
    }
    return summary;
}

PoaPosResult empirical_poa_pos(const Instance& inst, Mechanism mech, Mode mode,
                               std::uint64_t cap) {
    PoaPosResult out;
    out.optimum = run_truthful(inst, Mechanism::bfs).utils.total;
    EquilibriaSummary summary = enumerate_equilibria(inst, mech, mode, cap);
    out.ne_count = summary.ne_count;
    out.min_ne_welfare = summary.min_ne_welfare;
    out.max_ne_welfare = summary.max_ne_welfare;
    if (out.optimum.is_zero()) {
        out.poa = Rational(1);
        out.pos = Rational(1);
        return out;
    }
    if (summary.ne_count == 0) {
        throw std::runtime_error("no Nash equilibrium found; this should be impossible");
    }
    out.poa = out.optimum / summary.min_ne_welfare;
    out.pos = out.optimum / summary.max_ne_welfare;
    return out;
}

BestResponse best_response(const Instance& inst, AgentId agent, const Report& others,
                           Mechanism mech, Mode mode, std::uint64_t cap) {
    if (agent < 0 || agent >= inst.num_agents()) {
        throw ValidationError("best_response: agent index out of range");
    }
    require_valid_profile(inst, others, mode);
    ProfileEvaluator ev(inst, mech, mode);
    const std::uint64_t count = ev.strategy_count(agent);
    if (count > cap) {
        throw CapExceeded("strategy set size " + std::to_string(count) + " exceeds cap " +
                          std::to_string(cap));
    }

    const auto caps = effective_capacities(inst, others, mode);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        if (i == agent) continue;
        ev.set_fragment(i, others.declared_edges[static_cast<size_t>(i)],
                        caps[static_cast<size_t>(i)]);
    }

    const StrategyCode truthful = ev.truthful_code(agent);
    ev.apply(agent, truthful);
    ev.run();
    BestResponse best;
    ev.agent_utility(agent, best.truthful_utility);
    best.utility = best.truthful_utility;
    best.edges = inst.edges[static_cast<size_t>(agent)];
    best.capacity = truthful.cap;

    Rational u;
    for (std::uint64_t sidx = 0; sidx < count; ++sidx) {
        const StrategyCode code = ev.decode(agent, sidx);
        if (code.mask == truthful.mask && code.cap == truthful.cap) continue;
        ev.apply(agent, code);
        ev.run();
        ev.agent_utility(agent, u);
        if (best.utility < u) {
            best.utility = u;
            best.edges = ev.decoded_edges(agent, code.mask);
            best.capacity = code.cap;
        }
    }
    best.gain = best.utility - best.truthful_utility;
    return best;
}

std::optional<Deviation> check_truthfulness(const Instance& inst, Mechanism mech, Mode mode,
                                            std::uint64_t cap) {
    ProfileEvaluator ev(inst, mech, mode);
    const int n = inst.num_agents();
    std::uint64_t work = 0;
    for (AgentId i = 0; i < n; ++i) work = sat_add(work, ev.strategy_count(i));
    if (work > cap) {
        throw CapExceeded("deviation scan size " + std::to_string(work) + " exceeds cap " +
                          std::to_string(cap));
    }

    ev.run();
    std::vector<Rational> truthful_u(static_cast<size_t>(n));
    for (AgentId i = 0; i < n; ++i) ev.agent_utility(i, truthful_u[static_cast<size_t>(i)]);

    Rational u_dev;
    for (AgentId i = 0; i < n; ++i) {
        const std::uint64_t count = ev.strategy_count(i);
        const StrategyCode truthful = ev.truthful_code(i);
        for (std::uint64_t s = 0; s < count; ++s) {
            const StrategyCode code = ev.decode(i, s);
            if (code.mask == truthful.mask && code.cap == truthful.cap) continue;
            ev.apply(i, code);
            ev.run();
            ev.agent_utility(i, u_dev);
            if (truthful_u[static_cast<size_t>(i)] < u_dev) {
                Deviation dev{i,
                              ev.decoded_edges(i, code.mask),
                              code.cap,
                              truthful_u[static_cast<size_t>(i)],
                              u_dev,
                              u_dev - truthful_u[static_cast<size_t>(i)]};
                return dev;
            }
        }
        ev.set_truthful(i);
    }
    return std::nullopt;
}

std::optional<CoalitionWitness> check_group_sp(const Instance& inst, Mechanism mech, Mode mode,
                                               int max_coalition, std::uint64_t cap) {
    if (max_coalition < 2) return std::nullopt;
    ProfileEvaluator ev(inst, mech, mode);
    const int n = inst.num_agents();
    const int max_size = std::min(max_coalition, n);

    std::vector<std::uint64_t> counts(static_cast<size_t>(n));
    for (AgentId i = 0; i < n; ++i) counts[static_cast<size_t>(i)] = ev.strategy_count(i);

    // Total enumeration budget across all coalitions, computed up front so a
    // cap failure is deterministic and happens before any work.
    std::uint64_t work = 0;
    std::vector<int> combo;
    auto accumulate = [&](auto&& self, int start, int left) -> void {
        if (left == 0) {
            std::uint64_t prod = 1;
            for (int i : combo) prod = sat_mul(prod, counts[static_cast<size_t>(i)]);
            work = sat_add(work, prod);
            return;
        }
        for (int i = start; i <= n - left; ++i) {
            combo.push_back(i);
            self(self, i + 1, left - 1);
            combo.pop_back();
        }
    };
    for (int size = 2; size <= max_size; ++size) accumulate(accumulate, 0, size);
    if (work > cap) {
        throw CapExceeded("coalition scan size " + std::to_string(work) + " exceeds cap " +
                          std::to_string(cap));
    }

    ev.run();
    std::vector<Rational> truthful_u(static_cast<size_t>(n));
    for (AgentId i = 0; i < n; ++i) ev.agent_utility(i, truthful_u[static_cast<size_t>(i)]);

    std::vector<AgentId> members;
    std::vector<std::uint64_t> idx;
    std::vector<Rational> new_u;
    std::optional<CoalitionWitness> witness;

    auto scan_coalition = [&]() -> bool {
        const size_t k = members.size();
        idx.assign(k, 0);
        new_u.assign(k, Rational(0));
        for (size_t r = 0; r < k; ++r) ev.apply_index(members[r], 0);
        for (;;) {
            bool all_truthful = true;
            for (size_t r = 0; r < k; ++r) {
                const StrategyCode code = ev.decode(members[r], idx[r]);
                const StrategyCode truthful = ev.truthful_code(members[r]);
                if (code.mask != truthful.mask || code.cap != truthful.cap) {
                    all_truthful = false;
                    break;
                }
            }
            if (!all_truthful) {
                ev.run();
                bool weakly_better = true;
                bool strictly = false;
                for (size_t r = 0; r < k && weakly_better; ++r) {
                    ev.agent_utility(members[r], new_u[r]);
                    const Rational& old_u = truthful_u[static_cast<size_t>(members[r])];
                    if (new_u[r] < old_u) {
                        weakly_better = false;
                    } else if (old_u < new_u[r]) {
                        strictly = true;
                    }
                }
                if (weakly_better && strictly) {
                    CoalitionWitness w;
                    w.coalition = members;
                    for (size_t r = 0; r < k; ++r) {
                        const StrategyCode code = ev.decode(members[r], idx[r]);
                        w.declarations.push_back(ev.decoded_edges(members[r], code.mask));
                        w.capacities.push_back(code.cap);
                        w.old_utilities.push_back(truthful_u[static_cast<size_t>(members[r])]);
                        w.new_utilities.push_back(new_u[r]);
                    }
                    witness = std::move(w);
                    return true;
                }
            }
            int r = static_cast<int>(k) - 1;
            while (r >= 0) {
                ++idx[static_cast<size_t>(r)];
                if (idx[static_cast<size_t>(r)] < counts[static_cast<size_t>(members[static_cast<size_t>(r)])]) {
                    ev.apply_index(members[static_cast<size_t>(r)], idx[static_cast<size_t>(r)]);
                    break;
                }
                idx[static_cast<size_t>(r)] = 0;
                ev.apply_index(members[static_cast<size_t>(r)], 0);
                --r;
            }
            if (r < 0) return false;
        }
    };

    std::vector<AgentId> stack;
    auto combos = [&](auto&& self, int start, int left) -> bool {
        if (left == 0) {
            members = stack;
            const bool found = scan_coalition();
            for (AgentId i : members) ev.set_truthful(i);
            return found;
        }
        for (int i = start; i <= n - left; ++i) {
            stack.push_back(i);
            if (self(self, i + 1, left - 1)) return true;
            stack.pop_back();
        }
        return false;
    };
    for (int size = 2; size <= max_size; ++size) {
        stack.clear();
        if (combos(combos, 0, size)) break;
    }
    return witness;
}

ClassificationReport classify_truthful_inputs(const Instance& inst) {
    ClassificationReport rep;

    rep.degree_leq_capacity = true;
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        if (static_cast<int>(inst.edges[static_cast<size_t>(i)].size()) >
            inst.capacities[static_cast<size_t>(i)]) {
            rep.degree_leq_capacity = false;
            break;
        }
    }

    {
        Outcome out = run_truthful(inst, Mechanism::bfs);
        std::vector<int> load(static_cast<size_t>(inst.num_agents()), 0);
        std::vector<AgentId> matched_to(static_cast<size_t>(inst.num_tasks()), -1);
        for (const auto& [a, t] : out.matching.pairs) {
            ++load[static_cast<size_t>(a)];
            matched_to[static_cast<size_t>(t)] = a;
        }
        rep.every_task_contested = true;
        for (TaskId t = 0; t < inst.num_tasks() && rep.every_task_contested; ++t) {
            bool contested = false;
            for (AgentId i = 0; i < inst.num_agents() && !contested; ++i) {
                if (!inst.has_edge(i, t)) continue;
                if (matched_to[static_cast<size_t>(t)] == i) continue;
                if (load[static_cast<size_t>(i)] < inst.capacities[static_cast<size_t>(i)]) {
                    contested = true;
                }
            }
            if (!contested) rep.every_task_contested = false;
        }
    }

    {
        rep.class_condition = true;
        std::vector<char> grouped(static_cast<size_t>(inst.num_agents()), 0);
        for (AgentId i = 0; i < inst.num_agents() && rep.class_condition; ++i) {
            if (grouped[static_cast<size_t>(i)]) continue;
            int members = 0;
            for (AgentId j = i; j < inst.num_agents(); ++j) {
                if (inst.edges[static_cast<size_t>(j)] == inst.edges[static_cast<size_t>(i)] &&
                    inst.capacities[static_cast<size_t>(j)] == inst.capacities[static_cast<size_t>(i)]) {
                    grouped[static_cast<size_t>(j)] = 1;
                    ++members;
                }
            }
            const int tasks = static_cast<int>(inst.edges[static_cast<size_t>(i)].size());
            const int b = inst.capacities[static_cast<size_t>(i)];
            const int ceiling = (tasks + b - 1) / b;
            if (members <= ceiling + 1) rep.class_condition = false;
        }
    }

    return rep;
}

}  // namespace mvbm
