#include "mvbm/instance.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "mvbm/errors.hpp"

namespace mvbm {

Mode parse_mode(const std::string& text) {
    if (text == "ems") return Mode::ems;
    if (text == "ecms") return Mode::ecms;
    throw ParseError("unknown mode: '" + text + "' (expected ems or ecms)");
}

std::string to_string(Mode mode) {
    return mode == Mode::ems ? "ems" : "ecms";
}

bool Instance::has_edge(AgentId i, TaskId j) const {
    const auto& row = edges[static_cast<size_t>(i)];
    return std::binary_search(row.begin(), row.end(), j);
}

void Instance::validate() const {
    if (values.empty()) throw ValidationError("instance must have at least one task");
    if (capacities.empty()) throw ValidationError("instance must have at least one agent");
    if (edges.size() != capacities.size()) {
        throw ValidationError("edge list count does not match agent count");
    }
    for (size_t j = 0; j < values.size(); ++j) {
        if (values[j].sign() <= 0) {
            throw ValidationError("task value must be positive (task " + std::to_string(j) + ")");
        }
    }
    for (size_t i = 0; i < capacities.size(); ++i) {
        if (capacities[i] < 1) {
            throw ValidationError("agent capacity must be at least 1 (agent " +
                                  std::to_string(i) + ")");
        }
        const auto& row = edges[i];
        for (size_t k = 0; k < row.size(); ++k) {
            if (row[k] < 0 || row[k] >= num_tasks()) {
                throw ValidationError("edge to out-of-range task (agent " + std::to_string(i) +
                                      ", task " + std::to_string(row[k]) + ")");
            }
            if (k > 0 && row[k] <= row[k - 1]) {
                throw ValidationError("edge list must be strictly ascending (agent " +
                                      std::to_string(i) + ")");
            }
        }
    }
}

namespace {

Rational value_from_json(const nlohmann::json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw ParseError("task value must be a rational string or integer");
}

}  // namespace

Instance Instance::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("instance JSON must be an object");
    if (!j.contains("tasks") || !j["tasks"].is_array()) {
        throw ParseError("instance JSON needs a \"tasks\" array");
    }
    if (!j.contains("agents") || !j["agents"].is_array()) {
        throw ParseError("instance JSON needs an \"agents\" array");
    }
    Instance inst;
    for (const auto& t : j["tasks"]) {
        if (!t.is_object() || !t.contains("value")) {
            throw ParseError("each task needs a \"value\" field");
        }
        inst.values.push_back(value_from_json(t["value"]));
    }
    for (const auto& a : j["agents"]) {
        if (!a.is_object() || !a.contains("capacity") || !a["capacity"].is_number_integer()) {
            throw ParseError("each agent needs an integer \"capacity\" field");
        }
        inst.capacities.push_back(a["capacity"].get<int>());
        std::vector<TaskId> row;
        if (a.contains("edges")) {
            if (!a["edges"].is_array()) throw ParseError("agent \"edges\" must be an array");
            for (const auto& e : a["edges"]) {
                if (!e.is_number_integer()) throw ParseError("edge entries must be task indices");
                row.push_back(e.get<int>());
            }
        }
        inst.edges.push_back(std::move(row));
    }
    inst.validate();
    return inst;
}

nlohmann::json Instance::to_json() const {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& v : values) tasks.push_back({{"value", v.str()}});
    nlohmann::json agents = nlohmann::json::array();
    for (size_t i = 0; i < capacities.size(); ++i) {
        agents.push_back({{"capacity", capacities[i]}, {"edges", edges[i]}});
    }
    return {{"tasks", tasks}, {"agents", agents}};
}

Instance Instance::load(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid instance JSON: ") + e.what());
    }
    return from_json(j);
}

Instance Instance::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open instance file: " + path);
    return load(f);
}

Report Report::truthful(const Instance& inst) {
    Report r;
    r.declared_edges = inst.edges;
    return r;
}

std::vector<ReportViolation> validate_report(const Instance& inst, const Report& report,
                                             Mode mode) {
    std::vector<ReportViolation> out;
    const int n = inst.num_agents();
    if (static_cast<int>(report.declared_edges.size()) != n) {
        out.push_back({-1, "declared edge lists do not match agent count"});
        return out;
    }
    for (AgentId i = 0; i < n; ++i) {
        const auto& row = report.declared_edges[static_cast<size_t>(i)];
        for (size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k] <= row[k - 1]) {
                out.push_back({i, "declared edges must be strictly ascending"});
                break;
            }
        }
        for (TaskId t : row) {
            if (t < 0 || t >= inst.num_tasks() || !inst.has_edge(i, t)) {
                out.push_back({i, "fabricated edge (task " + std::to_string(t) + ")"});
            }
        }
    }
    if (!report.declared_capacities.empty()) {
        if (mode == Mode::ems) {
            out.push_back({-1, "declared capacities are not allowed in ems mode"});
        } else if (static_cast<int>(report.declared_capacities.size()) != n) {
            out.push_back({-1, "declared capacities do not match agent count"});
        } else {
            for (AgentId i = 0; i < n; ++i) {
                int c = report.declared_capacities[static_cast<size_t>(i)];
                if (c < 1) {
                    out.push_back({i, "declared capacity must be at least 1"});
                } else if (c > inst.capacities[static_cast<size_t>(i)]) {
                    out.push_back({i, "capacity exceeds true capacity"});
                }
            }
        }
    }
    return out;
}

void Matching::normalize() {
    std::sort(pairs.begin(), pairs.end());
    auto dup = std::adjacent_find(pairs.begin(), pairs.end());
    if (dup != pairs.end()) throw ValidationError("duplicate pair in matching");
}

Matching Matching::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array()) {
        throw ParseError("matching JSON needs a \"pairs\" array");
    }
    Matching mu;
    for (const auto& p : j["pairs"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
            !p[1].is_number_integer()) {
            throw ParseError("each pair must be [agent, task]");
        }
        mu.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
    mu.normalize();
    return mu;
}

nlohmann::json Matching::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, t] : pairs) arr.push_back({a, t});
    return {{"pairs", arr}};
}

void validate_matching(const Instance& inst, const Matching& mu) {
    std::vector<int> load(static_cast<size_t>(inst.num_agents()), 0);
    std::vector<bool> task_used(static_cast<size_t>(inst.num_tasks()), false);
    for (const auto& [a, t] : mu.pairs) {
        if (a < 0 || a >= inst.num_agents() || t < 0 || t >= inst.num_tasks()) {
            throw ValidationError("matching pair out of range");
        }
        if (!inst.has_edge(a, t)) {
            throw ValidationError("matching uses a non-existent edge (agent " +
                                  std::to_string(a) + ", task " + std::to_string(t) + ")");
        }
        if (task_used[static_cast<size_t>(t)]) {
            throw ValidationError("task matched twice (task " + std::to_string(t) + ")");
        }
        task_used[static_cast<size_t>(t)] = true;
        if (++load[static_cast<size_t>(a)] > inst.capacities[static_cast<size_t>(a)]) {
            throw ValidationError("agent capacity exceeded (agent " + std::to_string(a) + ")");
        }
    }
}

UtilityVector utilities(const Instance& inst, const Matching& mu) {
    validate_matching(inst, mu);
    UtilityVector u;
    u.per_agent.assign(static_cast<size_t>(inst.num_agents()), Rational(0));
    for (const auto& [a, t] : mu.pairs) {
        u.per_agent[static_cast<size_t>(a)] += inst.values[static_cast<size_t>(t)];
        u.total += inst.values[static_cast<size_t>(t)];
    }
    return u;
}

Rational matching_welfare(const Instance& inst, const Matching& mu) {
    Rational w;
    for (const auto& [a, t] : mu.pairs) w += inst.values[static_cast<size_t>(t)];
    return w;
}

}  // namespace mvbm
