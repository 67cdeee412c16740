#include "mvbm/engine.hpp"

#include <algorithm>
#include <numeric>

#include "mvbm/errors.hpp"

namespace mvbm {

std::vector<TaskId> task_order(const std::vector<Rational>& values) {
    std::vector<TaskId> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](TaskId a, TaskId b) {
        const auto& va = values[static_cast<size_t>(a)];
        const auto& vb = values[static_cast<size_t>(b)];
        if (va != vb) return vb < va;
        return a < b;
    });
    return order;
}

void MatchingEngine::set_problem(const std::vector<std::vector<TaskId>>& declared_edges,
                                 const std::vector<int>& capacities, int num_tasks,
                                 const Matching& start) {
    n_ = static_cast<int>(capacities.size());
    m_ = num_tasks;
    caps_ = capacities.data();

    matched_agent_.assign(static_cast<size_t>(m_), -1);
    load_.assign(static_cast<size_t>(n_), 0);
    agent_tasks_.resize(static_cast<size_t>(n_));
    for (auto& v : agent_tasks_) v.clear();

    adj_start_.assign(static_cast<size_t>(m_) + 1, 0);
    for (const auto& row : declared_edges) {
        for (TaskId t : row) ++adj_start_[static_cast<size_t>(t) + 1];
    }
    for (int t = 0; t < m_; ++t) adj_start_[static_cast<size_t>(t) + 1] += adj_start_[static_cast<size_t>(t)];
    adj_.resize(static_cast<size_t>(adj_start_[static_cast<size_t>(m_)]));
    adj_cursor_.assign(adj_start_.begin(), adj_start_.end() - 1);
    for (AgentId i = 0; i < n_; ++i) {
        for (TaskId t : declared_edges[static_cast<size_t>(i)]) {
            adj_[static_cast<size_t>(adj_cursor_[static_cast<size_t>(t)]++)] = i;
        }
    }

    for (const auto& [a, t] : start.pairs) {
        matched_agent_[static_cast<size_t>(t)] = a;
        ++load_[static_cast<size_t>(a)];
        agent_tasks_[static_cast<size_t>(a)].push_back(t);
    }
    for (auto& v : agent_tasks_) std::sort(v.begin(), v.end());

    agent_seen_.assign(static_cast<size_t>(n_), 0);
    task_seen_.assign(static_cast<size_t>(m_), 0);
    came_from_task_.assign(static_cast<size_t>(m_), -1);
    via_agent_.assign(static_cast<size_t>(m_), -1);
    stamp_ = 0;
}

bool MatchingEngine::search(TaskId start, SearchKind kind) {
    path_.clear();
    const int begin = adj_start_[static_cast<size_t>(start)];
    const int end = adj_start_[static_cast<size_t>(start) + 1];
    if (begin == end) return false;

    if (kind == SearchKind::approx_len1) {
        for (int k = begin; k < end; ++k) {
            AgentId a = adj_[static_cast<size_t>(k)];
            if (load_[static_cast<size_t>(a)] < caps_[a]) {
                path_.emplace_back(start, a);
                return true;
            }
        }
        return false;
    }

    ++stamp_;
    task_seen_[static_cast<size_t>(start)] = stamp_;

    if (kind == SearchKind::dfs) {
        if (!dfs_visit(start)) return false;
        std::reverse(path_.begin(), path_.end());
        return true;
    }

    queue_.clear();
    queue_.push_back(start);
    for (size_t qi = 0; qi < queue_.size(); ++qi) {
        TaskId t = queue_[qi];
        const int tb = adj_start_[static_cast<size_t>(t)];
        const int te = adj_start_[static_cast<size_t>(t) + 1];
        for (int k = tb; k < te; ++k) {
            AgentId a = adj_[static_cast<size_t>(k)];
            if (agent_seen_[static_cast<size_t>(a)] == stamp_) continue;
            if (load_[static_cast<size_t>(a)] < caps_[a]) {
                path_.emplace_back(t, a);
                while (t != start) {
                    AgentId via = via_agent_[static_cast<size_t>(t)];
                    t = came_from_task_[static_cast<size_t>(t)];
                    path_.emplace_back(t, via);
                }
                std::reverse(path_.begin(), path_.end());
                return true;
            }
            agent_seen_[static_cast<size_t>(a)] = stamp_;
            for (TaskId t2 : agent_tasks_[static_cast<size_t>(a)]) {
                if (task_seen_[static_cast<size_t>(t2)] == stamp_) continue;
                task_seen_[static_cast<size_t>(t2)] = stamp_;
                came_from_task_[static_cast<size_t>(t2)] = t;
                via_agent_[static_cast<size_t>(t2)] = a;
                queue_.push_back(t2);
            }
        }
    }
    return false;
}

bool MatchingEngine::dfs_visit(TaskId t) {
    const int tb = adj_start_[static_cast<size_t>(t)];
    const int te = adj_start_[static_cast<size_t>(t) + 1];
    for (int k = tb; k < te; ++k) {
        AgentId a = adj_[static_cast<size_t>(k)];
        if (agent_seen_[static_cast<size_t>(a)] == stamp_) continue;
        if (load_[static_cast<size_t>(a)] < caps_[a]) {
            path_.emplace_back(t, a);
            return true;
        }
        agent_seen_[static_cast<size_t>(a)] = stamp_;
        for (TaskId t2 : agent_tasks_[static_cast<size_t>(a)]) {
            if (task_seen_[static_cast<size_t>(t2)] == stamp_) continue;
            task_seen_[static_cast<size_t>(t2)] = stamp_;
            if (dfs_visit(t2)) {
                path_.emplace_back(t, a);
                return true;
            }
        }
    }
    return false;
}

void MatchingEngine::apply_last_path() {
    const size_t k = path_.size();
    for (size_t r = 0; r < k; ++r) {
        auto [t, a] = path_[r];
        auto& tasks = agent_tasks_[static_cast<size_t>(a)];
        if (r + 1 < k) {
            TaskId removed = path_[r + 1].first;
            tasks.erase(std::find(tasks.begin(), tasks.end(), removed));
        }
        tasks.insert(std::upper_bound(tasks.begin(), tasks.end(), t), t);
        matched_agent_[static_cast<size_t>(t)] = a;
    }
    ++load_[static_cast<size_t>(path_.back().second)];
}

void MatchingEngine::solve(std::span<const TaskId> order, SearchKind kind) {
    for (TaskId t : order) {
        if (search(t, kind)) apply_last_path();
    }
}

Matching MatchingEngine::matching() const {
    Matching mu;
    for (TaskId t = 0; t < m_; ++t) {
        if (matched_agent_[static_cast<size_t>(t)] != -1) {
            mu.pairs.emplace_back(matched_agent_[static_cast<size_t>(t)], t);
        }
    }
    mu.normalize();
    return mu;
}

Matching solve_matching(const std::vector<std::vector<TaskId>>& agent_edges,
                        const std::vector<int>& capacities,
                        const std::vector<Rational>& values, SearchKind kind) {
    MatchingEngine eng;
    eng.set_problem(agent_edges, capacities, static_cast<int>(values.size()));
    auto order = task_order(values);
    eng.solve(order, kind);
    return eng.matching();
}

std::optional<AugmentingPath> find_augmenting_path(
    TaskId task, const Matching& current,
    const std::vector<std::vector<TaskId>>& agent_edges,
    const std::vector<int>& capacities, int num_tasks, SearchKind kind) {
    for (const auto& [a, t] : current.pairs) {
        if (t == task) throw ValidationError("task is already matched");
    }
    MatchingEngine eng;
    eng.set_problem(agent_edges, capacities, num_tasks, current);
    if (!eng.search(task, kind)) return std::nullopt;
    return AugmentingPath{eng.last_path()};
}

Matching apply_path(const Matching& current, const AugmentingPath& path,
                    const std::vector<int>& capacities) {
    if (path.hops.empty()) throw ValidationError("path is not augmenting: empty");
    const auto& hops = path.hops;

    std::vector<int> load(capacities.size(), 0);
    for (const auto& [a, t] : current.pairs) ++load[static_cast<size_t>(a)];
    auto in_matching = [&](AgentId a, TaskId t) {
        return std::binary_search(current.pairs.begin(), current.pairs.end(),
                                  std::make_pair(a, t));
    };
    auto task_matched = [&](TaskId t) {
        for (const auto& [a2, t2] : current.pairs) {
            if (t2 == t) return true;
        }
        return false;
    };

    if (task_matched(hops.front().first)) {
        throw ValidationError("path is not augmenting: start task already matched");
    }
    for (size_t r = 0; r < hops.size(); ++r) {
        auto [t, a] = hops[r];
        if (a < 0 || static_cast<size_t>(a) >= capacities.size()) {
            throw ValidationError("path is not augmenting: agent out of range");
        }
        if (in_matching(a, t)) {
            throw ValidationError("path is not augmenting: hop edge already in matching");
        }
        if (r + 1 < hops.size()) {
            if (!in_matching(a, hops[r + 1].first)) {
                throw ValidationError("path is not augmenting: missing matched edge");
            }
            if (load[static_cast<size_t>(a)] != capacities[static_cast<size_t>(a)]) {
                throw ValidationError("path is not augmenting: interior agent not saturated");
            }
        } else if (load[static_cast<size_t>(a)] >= capacities[static_cast<size_t>(a)]) {
            throw ValidationError("path is not augmenting: terminal agent saturated");
        }
        for (size_t r2 = r + 1; r2 < hops.size(); ++r2) {
            if (hops[r2].first == t || hops[r2].second == a) {
                throw ValidationError("path is not augmenting: repeated vertex");
            }
        }
    }

    Matching out = current;
    for (size_t r = 0; r + 1 < hops.size(); ++r) {
        auto removed = std::make_pair(hops[r].second, hops[r + 1].first);
        out.pairs.erase(std::find(out.pairs.begin(), out.pairs.end(), removed));
    }
    for (auto [t, a] : hops) out.pairs.emplace_back(a, t);
    out.normalize();
    return out;
}

}  // namespace mvbm
