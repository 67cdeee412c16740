#include "mvbm/mechanisms.hpp"

#include <algorithm>

#include "mvbm/errors.hpp"

namespace mvbm {

Mechanism parse_mechanism(const std::string& text) {
    if (text == "bfs") return Mechanism::bfs;
    if (text == "dfs") return Mechanism::dfs;
    if (text == "ap") return Mechanism::ap;
    throw ParseError("unknown mechanism: '" + text + "' (expected bfs, dfs, or ap)");
}

std::string to_string(Mechanism mech) {
    switch (mech) {
        case Mechanism::bfs: return "bfs";
        case Mechanism::dfs: return "dfs";
        default: return "ap";
    }
}

SearchKind search_kind(Mechanism mech) {
    switch (mech) {
        case Mechanism::bfs: return SearchKind::bfs;
        case Mechanism::dfs: return SearchKind::dfs;
        default: return SearchKind::approx_len1;
    }
}

Outcome run_mechanism(const Instance& inst, const Report& report, Mode mode, Mechanism mech) {
    auto violations = validate_report(inst, report, mode);
    if (!violations.empty()) {
        throw ValidationError("invalid report (agent " + std::to_string(violations[0].agent) +
                              "): " + violations[0].message);
    }
    const std::vector<int>& caps = (mode == Mode::ecms && !report.declared_capacities.empty())
                                       ? report.declared_capacities
                                       : inst.capacities;
    Outcome out;
    out.matching = solve_matching(report.declared_edges, caps, inst.values, search_kind(mech));
    out.utils = utilities(inst, out.matching);
    return out;
}

Outcome run_truthful(const Instance& inst, Mechanism mech) {
    return run_mechanism(inst, Report::truthful(inst), Mode::ems, mech);
}

std::optional<EdgeHideWitness> best_single_edge_hide(const Instance& inst, Mechanism mech) {
    Outcome truthful = run_truthful(inst, mech);
    Report report = Report::truthful(inst);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        auto& row = report.declared_edges[static_cast<size_t>(i)];
        const auto& true_row = inst.edges[static_cast<size_t>(i)];
        for (size_t k = 0; k < true_row.size(); ++k) {
            row.clear();
            for (size_t k2 = 0; k2 < true_row.size(); ++k2) {
                if (k2 != k) row.push_back(true_row[k2]);
            }
            Outcome out = run_mechanism(inst, report, Mode::ems, mech);
            const Rational& u_new = out.utils.per_agent[static_cast<size_t>(i)];
            const Rational& u_old = truthful.utils.per_agent[static_cast<size_t>(i)];
            if (u_old < u_new) {
                return EdgeHideWitness{i, true_row[k], u_old, u_new, u_new - u_old};
            }
        }
        row = true_row;
    }
    return std::nullopt;
}

}  // namespace mvbm
