#include <doctest.h>

#include <vector>

#include "mvbm/errors.hpp"
#include "mvbm/fixtures.hpp"
#include "mvbm/strategy.hpp"

using namespace mvbm;

TEST_SUITE_BEGIN("strategy");

namespace {

Matching pairs(std::vector<std::pair<AgentId, TaskId>> p) {
    Matching mu;
    mu.pairs = std::move(p);
    mu.normalize();
    return mu;
}

FixtureParams eps_params(long num, long den) {
    FixtureParams params;
    params.eps = Rational(num, den);
    return params;
}

}  // namespace

TEST_CASE("fcfs policies reserve top-valued tasks in agent order") {
    SUBCASE("capacity-2 agent takes the two best, rivals get nothing") {
        const Instance inst = fixture(FixtureId::ex2_order_dependence);
        const FcfsResult fcfs = fcfs_policies(inst);
        CHECK(fcfs.policies ==
              std::vector<std::vector<TaskId>>{{0, 1}, {}, {}});
        CHECK(fcfs.union_matching() == pairs({{0, 0}, {0, 1}}));
        const Report r = fcfs.as_report();
        CHECK(r.declared_edges == fcfs.policies);
        CHECK(r.declared_capacities.empty());
    }
    SUBCASE("shared-top-task instance") {
        const Instance inst = fixture(FixtureId::thm1_impossibility);
        CHECK(fcfs_policies(inst).policies ==
              std::vector<std::vector<TaskId>>{{0}, {2}});
    }
    SUBCASE("tightness instance: agent 1 is left empty-handed") {
        const Instance inst = fixture(FixtureId::thm3_tightness, eps_params(1, 100));
        CHECK(fcfs_policies(inst).policies == std::vector<std::vector<TaskId>>{{0}, {}});
    }
}

TEST_CASE("length-1 mechanism returns exactly the fcfs union") {
    for (FixtureId id : {FixtureId::thm1_impossibility, FixtureId::ex1_collusion,
                         FixtureId::ex2_order_dependence, FixtureId::app_ex_bfs_vs_dfs,
                         FixtureId::app_ex_classes}) {
        const Instance inst = fixture(id);
        CHECK(run_truthful(inst, Mechanism::ap).matching == fcfs_policies(inst).union_matching());
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomInstanceParams params;
        params.seed = seed;
        params.n = 2 + static_cast<int>(seed % 3);
        params.m = 2 + static_cast<int>(seed % 5);
        params.b_max = 3;
        const Instance inst = random_instance(params);
        CHECK(run_truthful(inst, Mechanism::ap).matching == fcfs_policies(inst).union_matching());
    }
}

TEST_CASE("optimal mechanisms leave the fcfs union fixed") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomInstanceParams params;
        params.seed = 1000 + seed;
        params.n = 2 + static_cast<int>(seed % 3);
        params.m = 2 + static_cast<int>(seed % 5);
        const Instance inst = random_instance(params);
        const FcfsResult fcfs = fcfs_policies(inst);
        const Report profile = fcfs.as_report();
        CHECK(run_mechanism(inst, profile, Mode::ems, Mechanism::bfs).matching ==
              fcfs.union_matching());
        CHECK(run_mechanism(inst, profile, Mode::ems, Mechanism::dfs).matching ==
              fcfs.union_matching());
    }
}

TEST_CASE("verify_nash") {
    const Instance inst = fixture(FixtureId::thm8_poa, eps_params(1, 1000));

    SUBCASE("the fcfs profile is an equilibrium") {
        const Report profile = fcfs_policies(inst).as_report();
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const auto v = verify_nash(inst, profile, mech, Mode::ems);
            CHECK(v.is_ne);
            CHECK_FALSE(v.deviation.has_value());
        }
    }
    SUBCASE("the truthful profile is not: agent 0 hides the cheap task") {
        const auto v = verify_nash(inst, Report::truthful(inst), Mechanism::bfs, Mode::ems);
        REQUIRE_FALSE(v.is_ne);
        REQUIRE(v.deviation.has_value());
        CHECK(v.deviation->agent == 0);
        CHECK(v.deviation->edges == std::vector<TaskId>{0});
        CHECK(v.deviation->old_utility == Rational(1));
        CHECK(v.deviation->new_utility == Rational(1001, 1000));
        CHECK(v.deviation->gain == Rational(1, 1000));
    }
    SUBCASE("ecms capacities in the profile are honoured") {
        Report profile = fcfs_policies(inst).as_report();
        profile.declared_capacities = {1, 1};
        CHECK(verify_nash(inst, profile, Mechanism::bfs, Mode::ecms).is_ne);
    }
    SUBCASE("invalid profiles are rejected") {
        Report bad = Report::truthful(inst);
        bad.declared_edges[1] = {0, 1};  // fabricated
        CHECK_THROWS_AS(verify_nash(inst, bad, Mechanism::bfs, Mode::ems), ValidationError);
    }
    SUBCASE("cap is enforced") {
        CHECK_THROWS_AS(verify_nash(inst, Report::truthful(inst), Mechanism::bfs, Mode::ems, 2),
                        CapExceeded);
    }
}

TEST_CASE("enumerate_equilibria on the tightness instance") {
    const Instance inst = fixture(FixtureId::thm8_poa, eps_params(1, 1000));
    std::vector<Report> nes;
    std::vector<Rational> welfares;
    const EquilibriaSummary summary = enumerate_equilibria(
        inst, Mechanism::bfs, Mode::ems, default_enumeration_cap(),
        [&](const Report& r, const Rational& w) {
            nes.push_back(r);
            welfares.push_back(w);
        });

    CHECK(summary.profiles_scanned == 3);  // agent 0 has 3 strategies, agent 1 has 1
    CHECK(summary.ne_count == 1);
    CHECK(summary.min_ne_welfare == Rational(1001, 1000));
    CHECK(summary.max_ne_welfare == Rational(1001, 1000));
    REQUIRE(nes.size() == 1);
    CHECK(nes[0].declared_edges == std::vector<std::vector<TaskId>>{{0}, {0}});
    CHECK(welfares[0] == Rational(1001, 1000));

    SUBCASE("profile-space cap") {
        CHECK_THROWS_AS(enumerate_equilibria(inst, Mechanism::bfs, Mode::ems, 2), CapExceeded);
    }
}

TEST_CASE("poa and pos") {
    SUBCASE("tightness instance: unique equilibrium pins both ratios") {
        const Instance inst = fixture(FixtureId::thm8_poa, eps_params(1, 1000));
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const PoaPosResult res = empirical_poa_pos(inst, mech, Mode::ems);
            CHECK(res.optimum == Rational(2001, 1000));
            CHECK(res.ne_count == 1);
            CHECK(res.poa == Rational(2001, 1001));
            CHECK(res.pos == Rational(2001, 1001));
        }
    }
    SUBCASE("identical results in ecms (capacities are all 1)") {
        const Instance inst = fixture(FixtureId::thm8_poa, eps_params(1, 1000));
        const PoaPosResult ems = empirical_poa_pos(inst, Mechanism::bfs, Mode::ems);
        const PoaPosResult ecms = empirical_poa_pos(inst, Mechanism::bfs, Mode::ecms);
        CHECK(ems.poa == ecms.poa);
        CHECK(ems.pos == ecms.pos);
        CHECK(ems.ne_count == ecms.ne_count);
        CHECK(ems.min_ne_welfare == ecms.min_ne_welfare);
        CHECK(ems.max_ne_welfare == ecms.max_ne_welfare);
    }
    SUBCASE("degree-within-capacity instances lose nothing at equilibrium") {
        FixtureParams params;
        params.seed = 3;
        const Instance inst = fixture(FixtureId::degree_leq_capacity_family, params);
        const PoaPosResult res = empirical_poa_pos(inst, Mechanism::bfs, Mode::ems);
        CHECK(res.poa == Rational(1));
        CHECK(res.pos == Rational(1));
    }
    SUBCASE("collusion instance: every profile of the length-1 mechanism is an equilibrium") {
        const Instance inst = fixture(FixtureId::ex1_collusion);
        const PoaPosResult res = empirical_poa_pos(inst, Mechanism::ap, Mode::ems);
        CHECK(res.ne_count == 3);
        CHECK(res.poa == Rational(1));
        CHECK(res.pos == Rational(1));
    }
    SUBCASE("edgeless instance: ratios default to 1") {
        Instance inst;
        inst.values = {Rational(1)};
        inst.capacities = {1};
        inst.edges = {{}};
        const PoaPosResult res = empirical_poa_pos(inst, Mechanism::bfs, Mode::ems);
        CHECK(res.optimum.is_zero());
        CHECK(res.ne_count == 1);
        CHECK(res.poa == Rational(1));
        CHECK(res.pos == Rational(1));
    }
}

TEST_CASE("best_response") {
    SUBCASE("capacity-2 agent against pinned rivals hides the augmentation bait") {
        // Rival a0 sees only task 1, rival a2 only task 0; agent 1 (capacity
        // 2) sees everything. Declaring {0,2} keeps task 0 from being pulled
        // away by an augmenting move through task 3.
        Instance inst;
        inst.values = {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 16)};
        inst.capacities = {1, 2, 1};
        inst.edges = {{1}, {0, 1, 2, 3}, {0}};
        inst.validate();

        const BestResponse br =
            best_response(inst, 1, Report::truthful(inst), Mechanism::bfs, Mode::ems);
        CHECK(br.truthful_utility == Rational(3, 16));
        CHECK(br.utility == Rational(5, 8));
        CHECK(br.gain == Rational(7, 16));
        // {0,2} and {0,1,2} tie at 5/8; the lower bitmask wins.
        CHECK(br.edges == std::vector<TaskId>{0, 2});
        CHECK(br.capacity == 2);
    }
    SUBCASE("truthful report wins ties") {
        const Instance inst = fixture(FixtureId::thm1_impossibility);
        const BestResponse br =
            best_response(inst, 1, Report::truthful(inst), Mechanism::ap, Mode::ems);
        CHECK(br.gain.is_zero());
        CHECK(br.edges == inst.edges[1]);
        CHECK(br.capacity == 1);
    }
    SUBCASE("top-capacity sum is attained under both optimal mechanisms") {
        const Instance inst = fixture(FixtureId::ex2_order_dependence);
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const BestResponse br =
                best_response(inst, 0, Report::truthful(inst), mech, Mode::ems);
            CHECK(br.utility == Rational(3, 4));  // 1/2 + 1/4
        }
    }
    SUBCASE("ecms strategy set includes capacities") {
        const Instance inst = fixture(FixtureId::ex2_order_dependence);
        const BestResponse br =
            best_response(inst, 0, Report::truthful(inst), Mechanism::bfs, Mode::ecms);
        CHECK(br.utility == Rational(3, 4));
        CHECK(br.capacity == 2);
    }
    SUBCASE("agent index is validated") {
        const Instance inst = fixture(FixtureId::thm1_impossibility);
        CHECK_THROWS_AS(best_response(inst, 5, Report::truthful(inst), Mechanism::bfs, Mode::ems),
                        ValidationError);
    }
}

TEST_CASE("check_truthfulness") {
    SUBCASE("shared-top-task instance: optimal mechanisms are manipulable") {
        const Instance inst = fixture(FixtureId::thm1_impossibility);
        for (Mechanism mech : {Mechanism::bfs, Mechanism::dfs}) {
            const auto dev = check_truthfulness(inst, mech, Mode::ems);
            REQUIRE(dev.has_value());
            CHECK(dev->agent == 0);
            CHECK(dev->edges == std::vector<TaskId>{0});
            CHECK(dev->old_utility == Rational(1, 10));
            CHECK(dev->new_utility == Rational(1));
            CHECK(dev->gain == Rational(9, 10));
        }
        CHECK_FALSE(check_truthfulness(inst, Mechanism::ap, Mode::ems).has_value());
        CHECK_FALSE(check_truthfulness(inst, Mechanism::ap, Mode::ecms).has_value());
    }
    SUBCASE("two-class example: dfs manipulable by agent 0, bfs not") {
        const Instance inst = fixture(FixtureId::app_ex_classes);
        CHECK_FALSE(check_truthfulness(inst, Mechanism::bfs, Mode::ems).has_value());
        const auto dev = check_truthfulness(inst, Mechanism::dfs, Mode::ems);
        REQUIRE(dev.has_value());
        CHECK(dev->agent == 0);
        CHECK(dev->edges == std::vector<TaskId>{0});
        CHECK(dev->old_utility == Rational(4, 27));
        CHECK(dev->new_utility == Rational(1, 3));
        CHECK(dev->gain == Rational(5, 27));
    }
    SUBCASE("complete 3x2 example: dfs manipulable by agent 0, bfs not") {
        const Instance inst = fixture(FixtureId::app_ex_bfs_vs_dfs);
        CHECK_FALSE(check_truthfulness(inst, Mechanism::bfs, Mode::ems).has_value());
        const auto dev = check_truthfulness(inst, Mechanism::dfs, Mode::ems);
        REQUIRE(dev.has_value());
        CHECK(dev->agent == 0);
        CHECK(dev->edges == std::vector<TaskId>{0});
        CHECK(dev->gain == Rational(1, 2));
    }
    SUBCASE("ecms mode scans capacity declarations too") {
        const Instance inst = fixture(FixtureId::thm8_poa, eps_params(1, 100));
        const auto dev = check_truthfulness(inst, Mechanism::bfs, Mode::ecms);
        REQUIRE(dev.has_value());
        CHECK(dev->agent == 0);
        CHECK(dev->capacity == 1);
    }
}

TEST_CASE("check_group_sp") {
    SUBCASE("collusion instance: pair {0,2} defeats the length-1 mechanism") {
        const Instance inst = fixture(FixtureId::ex1_collusion);
        const auto w = check_group_sp(inst, Mechanism::ap, Mode::ems, 2);
        REQUIRE(w.has_value());
        CHECK(w->coalition == std::vector<AgentId>{0, 2});
        CHECK(w->declarations == std::vector<std::vector<TaskId>>{{1}, {0}});
        CHECK(w->capacities == std::vector<int>{1, 1});
        CHECK(w->old_utilities == std::vector<Rational>{Rational(1), Rational(0)});
        CHECK(w->new_utilities == std::vector<Rational>{Rational(1), Rational(1)});
    }
    SUBCASE("max_coalition below 2 scans nothing") {
        const Instance inst = fixture(FixtureId::ex1_collusion);
        CHECK_FALSE(check_group_sp(inst, Mechanism::ap, Mode::ems, 1).has_value());
    }
    SUBCASE("degree-within-capacity instances are coalition-proof") {
        FixtureParams params;
        params.seed = 11;
        const Instance inst = fixture(FixtureId::degree_leq_capacity_family, params);
        CHECK_FALSE(check_group_sp(inst, Mechanism::ap, Mode::ems, 3).has_value());
    }
    SUBCASE("cap is enforced") {
        const Instance inst = fixture(FixtureId::app_ex_classes);
        CHECK_THROWS_AS(check_group_sp(inst, Mechanism::ap, Mode::ems, 3, 10), CapExceeded);
    }
}

TEST_CASE("classify_truthful_inputs") {
    SUBCASE("shared-top-task instance satisfies none of the conditions") {
        const auto rep = classify_truthful_inputs(fixture(FixtureId::thm1_impossibility));
        CHECK_FALSE(rep.degree_leq_capacity);
        CHECK_FALSE(rep.every_task_contested);
        CHECK_FALSE(rep.class_condition);
    }
    SUBCASE("two-class example is contested but misses the class-size bound") {
        const auto rep = classify_truthful_inputs(fixture(FixtureId::app_ex_classes));
        CHECK_FALSE(rep.degree_leq_capacity);
        CHECK(rep.every_task_contested);
        CHECK_FALSE(rep.class_condition);
    }
    SUBCASE("generated families deliver their structural guarantee") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            FixtureParams params;
            params.seed = seed;
            CHECK(classify_truthful_inputs(fixture(FixtureId::degree_leq_capacity_family, params))
                      .degree_leq_capacity);
            CHECK(classify_truthful_inputs(fixture(FixtureId::complete_contested_family, params))
                      .every_task_contested);
        }
    }
    SUBCASE("four interchangeable agents on one task satisfy the class bound") {
        Instance inst;
        inst.values = {Rational(1)};
        inst.capacities = {1, 1, 1, 1};
        inst.edges = {{0}, {0}, {0}, {0}};
        inst.validate();
        const auto rep = classify_truthful_inputs(inst);
        CHECK(rep.degree_leq_capacity);
        CHECK(rep.every_task_contested);
        CHECK(rep.class_condition);
    }
}

TEST_SUITE_END();
