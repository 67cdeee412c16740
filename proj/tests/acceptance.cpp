// Acceptance suite: the ten project-level checks, each printing exactly one
// PASS/FAIL line. Run with no arguments for all criteria or with
// `--criterion N` for one. Exits non-zero if any executed criterion fails.
#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mvbm/engine.hpp"
#include "mvbm/errors.hpp"
#include "mvbm/fixtures.hpp"
#include "mvbm/mechanisms.hpp"
#include "mvbm/oracle.hpp"
#include "mvbm/strategy.hpp"

using namespace mvbm;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& message) {
    if (!ok) throw Failure(message);
}

template <typename T>
std::string str_of(const T& value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

Instance random_batch_instance(std::uint64_t k, int n_lo, int n_span, int m_lo, int m_span,
                               int b_max, ValueMode value_mode = ValueMode::distinct) {
    RandomInstanceParams params;
    params.seed = k;
    params.n = n_lo + static_cast<int>(k % static_cast<std::uint64_t>(n_span));
    params.m = m_lo + static_cast<int>((k / 7) % static_cast<std::uint64_t>(m_span));
    params.b_max = b_max;
    params.value_mode = value_mode;
    return random_instance(params);
}

// --- criterion 1 -----------------------------------------------------------
// Both full-search mechanisms equal the brute-force optimum on the entire
// exhaustive small-instance space, in under five minutes.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepLimits limits;
    std::uint64_t checked = 0;
    for_each_sweep_instance(limits, [&](std::uint64_t idx, const Instance& inst) {
        const Rational opt = brute_force_welfare(inst.edges, inst.capacities, inst.values);
        const Rational bfs = run_truthful(inst, Mechanism::bfs).utils.total;
        const Rational dfs = run_truthful(inst, Mechanism::dfs).utils.total;
        expect(bfs == opt, "bfs welfare " + bfs.str() + " != optimum " + opt.str() +
                               " at sweep index " + std::to_string(idx));
        expect(dfs == opt, "dfs welfare " + dfs.str() + " != optimum " + opt.str() +
                               " at sweep index " + std::to_string(idx));
        ++checked;
    });
    expect(checked == sweep_count(limits), "sweep did not visit every instance");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    expect(elapsed.count() < 300,
           "sweep took " + std::to_string(elapsed.count()) + "s (budget 300s)");
}

// --- criterion 2 -----------------------------------------------------------
// The length-1 mechanism is a 2-approximation: on the exhaustive sweep and
// on 10,000 random instances up to 6x6; and on the tightness family the
// ratio optimum/welfare equals (2+eps)/(1+eps) exactly.
void criterion_2() {
    const SweepLimits limits;
    for_each_sweep_instance(limits, [&](std::uint64_t idx, const Instance& inst) {
        const Rational opt = brute_force_welfare(inst.edges, inst.capacities, inst.values);
        const Rational ap = run_truthful(inst, Mechanism::ap).utils.total;
        expect(Rational(2) * ap >= opt,
               "2*ap < optimum at sweep index " + std::to_string(idx));
    });

    for (std::uint64_t k = 0; k < 10000; ++k) {
        RandomInstanceParams params;
        params.seed = k;
        params.n = 1 + static_cast<int>(k % 6);
        params.m = 1 + static_cast<int>((k / 6) % 6);
        const Instance inst = random_instance(params);
        const Rational opt =
            brute_force_welfare(inst.edges, inst.capacities, inst.values, 1'000'000);
        const Rational ap = run_truthful(inst, Mechanism::ap).utils.total;
        expect(Rational(2) * ap >= opt, "2*ap < optimum at random seed " + std::to_string(k));
    }

    for (long den : {10L, 100L, 1000L}) {
        FixtureParams params;
        params.eps = Rational(1, den);
        const Instance inst = fixture(FixtureId::thm3_tightness, params);
        const Rational opt = brute_force_welfare(inst.edges, inst.capacities, inst.values);
        const Rational ap = run_truthful(inst, Mechanism::ap).utils.total;
        const Rational expected = (Rational(2) + params.eps) / (Rational(1) + params.eps);
        expect(opt / ap == expected, "tightness ratio mismatch at eps=1/" + std::to_string(den) +
                                         ": " + (opt / ap).str() + " != " + expected.str());
    }
}

// --- criterion 3 -----------------------------------------------------------
// Shared-top-task instance: both optimal mechanisms are manipulable with an
// exact utility gain of 9/10 (1/10 -> 1); the length-1 mechanism is not.
void criterion_3() {
    const Instance inst = fixture(FixtureId::thm1_impossibility);
    for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
        const auto dev = check_truthfulness(inst, mech, Mode::ems);
        expect(dev.has_value(), "no manipulation found for " + to_string(mech));
        expect(dev->old_utility == Rational(1, 10),
               "old utility " + dev->old_utility.str() + " != 1/10");
        expect(dev->new_utility == Rational(1), "new utility " + dev->new_utility.str() + " != 1");
        expect(dev->gain == Rational(9, 10), "gain " + dev->gain.str() + " != 9/10");
    }
    expect(!check_truthfulness(inst, Mechanism::ap, Mode::ems).has_value(),
           "unexpected manipulation for ap");
}

// --- criterion 4 -----------------------------------------------------------
// On 1,000 random instances the FCFS profile is a Nash equilibrium of both
// optimal mechanisms, and running them on it returns exactly its union.
void criterion_4() {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const Instance inst = random_batch_instance(k, 2, 4, 2, 7, 3);
        const FcfsResult fcfs = fcfs_policies(inst);
        const Report profile = fcfs.as_report();
        const Matching mu = fcfs.union_matching();
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            expect(verify_nash(inst, profile, mech, Mode::ems).is_ne,
                   "fcfs profile not an equilibrium for " + to_string(mech) + " at seed " +
                       std::to_string(k));
            expect(run_mechanism(inst, profile, Mode::ems, mech).matching == mu,
                   "mechanism output differs from the fcfs union for " + to_string(mech) +
                       " at seed " + std::to_string(k));
        }
    }
}

// --- criterion 5 -----------------------------------------------------------
// The truthful length-1 mechanism returns exactly the FCFS union on the same
// 1,000 instances.
void criterion_5() {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const Instance inst = random_batch_instance(k, 2, 4, 2, 7, 3);
        expect(run_truthful(inst, Mechanism::ap).matching == fcfs_policies(inst).union_matching(),
               "length-1 output differs from the fcfs union at seed " + std::to_string(k));
    }
}

// --- criterion 6 -----------------------------------------------------------
// Equilibrium welfare bounds: the eps=1/1000 tightness instance yields
// poa = pos = 2001/1001 exactly, and 1 <= pos <= poa <= 2 on every
// exhaustively scanned instance for both optimal mechanisms.
void criterion_6() {
    FixtureParams params;
    params.eps = Rational(1, 1000);
    const Instance tight = fixture(FixtureId::thm8_poa, params);
    for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
        const PoaPosResult res = empirical_poa_pos(tight, mech, Mode::ems);
        expect(res.poa == Rational(2001, 1001),
               "poa " + res.poa.str() + " != 2001/1001 for " + to_string(mech));
        expect(res.pos == Rational(2001, 1001),
               "pos " + res.pos.str() + " != 2001/1001 for " + to_string(mech));
    }

    const SweepLimits limits;
    for_each_sweep_instance(limits, [&](std::uint64_t idx, const Instance& inst) {
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const PoaPosResult res = empirical_poa_pos(inst, mech, Mode::ems);
            expect(Rational(1) <= res.pos,
                   "pos < 1 at sweep index " + std::to_string(idx) + " for " + to_string(mech));
            expect(res.pos <= res.poa,
                   "pos > poa at sweep index " + std::to_string(idx) + " for " + to_string(mech));
            expect(res.poa <= Rational(2),
                   "poa > 2 at sweep index " + std::to_string(idx) + " for " + to_string(mech));
        }
    });
}

// --- criterion 7 -----------------------------------------------------------
// Degree-within-capacity instances admit no manipulation under any
// mechanism; on the two hand-built contrast examples the depth-first
// mechanism is manipulable by agent 0 while the breadth-first one is not.
void criterion_7() {
    for (std::uint64_t k = 0; k < 500; ++k) {
        FixtureParams params;
        params.seed = k;
        params.n = 2 + static_cast<int>(k % 4);
        params.m = 2 + static_cast<int>((k / 7) % 5);
        params.b_max = 3;
        const Instance inst = fixture(FixtureId::degree_leq_capacity_family, params);
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs, Mechanism::ap}) {
            expect(!check_truthfulness(inst, mech, Mode::ems).has_value(),
                   "manipulation found for " + to_string(mech) + " at seed " + std::to_string(k));
        }
    }
    for (FixtureId id : {FixtureId::app_ex_bfs_vs_dfs, FixtureId::app_ex_classes}) {
        const Instance inst = fixture(id);
        const auto dev = check_truthfulness(inst, Mechanism::dfs, Mode::ems);
        expect(dev.has_value(), "no dfs manipulation on " + to_string(id));
        expect(dev->agent == 0,
               "dfs witness agent " + std::to_string(dev->agent) + " != 0 on " + to_string(id));
        expect(!check_truthfulness(inst, Mechanism::bfs, Mode::ems).has_value(),
               "unexpected bfs manipulation on " + to_string(id));
    }
}

// --- criterion 8 -----------------------------------------------------------
// With declared capacities in play (ecms) the length-1 mechanism stays
// truthful over the full edge-subset x capacity strategy set, and the
// tightness instance's equilibrium metrics match between modes.
void criterion_8() {
    for (std::uint64_t k = 0; k < 500; ++k) {
        const Instance inst = random_batch_instance(k, 2, 4, 2, 6, 3);
        expect(!check_truthfulness(inst, Mechanism::ap, Mode::ecms).has_value(),
               "ecms manipulation of ap at seed " + std::to_string(k));
    }

    FixtureParams params;
    params.eps = Rational(1, 1000);
    const Instance tight = fixture(FixtureId::thm8_poa, params);
    for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
        const PoaPosResult ems = empirical_poa_pos(tight, mech, Mode::ems);
        const PoaPosResult ecms = empirical_poa_pos(tight, mech, Mode::ecms);
        expect(ems.poa == ecms.poa && ems.pos == ecms.pos && ems.ne_count == ecms.ne_count &&
                   ems.min_ne_welfare == ecms.min_ne_welfare &&
                   ems.max_ne_welfare == ecms.max_ne_welfare,
               "ems/ecms equilibrium metrics differ for " + to_string(mech));
    }
}

// --- criterion 9 -----------------------------------------------------------
// With pairwise-distinct task values the length-1 mechanism resists
// coalitions of size up to 3; the hand-built collusion instance yields the
// {0,2} pair witness.
void criterion_9() {
    for (std::uint64_t k = 0; k < 500; ++k) {
        const Instance inst = random_batch_instance(k, 2, 3, 2, 3, 2);
        expect(!check_group_sp(inst, Mechanism::ap, Mode::ems, 3).has_value(),
               "coalition witness against ap at seed " + std::to_string(k));
    }
    const Instance inst = fixture(FixtureId::ex1_collusion);
    const auto w = check_group_sp(inst, Mechanism::ap, Mode::ems, 2);
    expect(w.has_value(), "no coalition witness on the collusion instance");
    expect(w->coalition == std::vector<AgentId>{0, 2},
           "coalition " + str_of(w->coalition.size()) + " members != {0,2}");
}

// --- criterion 10 ----------------------------------------------------------
// Agent 0's best response against truthful rivals attains exactly the sum of
// its top-capacity connected task values under both optimal mechanisms.
void criterion_10() {
    for (std::uint64_t k = 0; k < 500; ++k) {
        const Instance inst = random_batch_instance(k, 2, 4, 2, 6, 3);

        std::vector<Rational> mine;
        for (TaskId t : inst.edges[0]) mine.push_back(inst.values[t]);
        std::sort(mine.begin(), mine.end(),
                  [](const Rational& a, const Rational& b) { return b < a; });
        Rational top;
        const size_t take = std::min<size_t>(mine.size(), static_cast<size_t>(inst.capacities[0]));
        for (size_t i = 0; i < take; ++i) top += mine[i];

        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const BestResponse br =
                best_response(inst, 0, Report::truthful(inst), mech, Mode::ems);
            expect(br.utility == top, "best response " + br.utility.str() + " != top sum " +
                                          top.str() + " at seed " + std::to_string(k) + " for " +
                                          to_string(mech));
        }
    }
}

struct Criterion {
    int id;
    const char* summary;
    void (*run)();
};

const Criterion kCriteria[] = {
    {1, "full-search welfare equals the brute-force optimum on the exhaustive sweep", criterion_1},
    {2, "length-1 welfare is within a factor 2, with exact tightness-family ratios", criterion_2},
    {3, "shared-top-task instance: gain 9/10 under bfs/dfs, none under ap", criterion_3},
    {4, "fcfs profile is an equilibrium and a fixed point of bfs/dfs", criterion_4},
    {5, "truthful length-1 output equals the fcfs union", criterion_5},
    {6, "poa = pos = 2001/1001 at eps 1/1000; 1 <= pos <= poa <= 2 on the sweep", criterion_6},
    {7, "degree-within-capacity inputs are unmanipulable; dfs-only witnesses on examples",
     criterion_7},
    {8, "ap stays truthful with declared capacities; metrics match across modes", criterion_8},
    {9, "ap resists coalitions up to size 3; collusion pair {0,2} reproduced", criterion_9},
    {10, "agent 0's best response attains its top-capacity value sum", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: " << argv[0] << " [--criterion N]\n";
            return 2;
        }
    }
    if (only < 0 || only > 10) {
        std::cerr << "criterion must be between 1 and 10\n";
        return 2;
    }

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            c.run();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        std::cout << verdict << " criterion " << c.id << ": " << c.summary << " [" << ms << " ms]";
        if (!detail.empty()) std::cout << " -- " << detail;
        std::cout << "\n";
    }
    return failures == 0 ? 0 : 1;
}
