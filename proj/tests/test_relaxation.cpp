#include <doctest.h>

#include "support.hpp"

#include <daerelax/relaxation.hpp>

using namespace dtest;

TEST_SUITE("relaxation") {

TEST_CASE("linear example repairs in one substitution") {
    RelaxationOptions opts;
    opts.method = Method::Substitution;
    ModificationReport rep = relax(make_intro(), opts);
    CHECK(rep.status == FinalStatus::Ok);
    CHECK(rep.modification_count() == 1);
    CHECK(rep.final_delta == 1);
    REQUIRE(rep.final_system);
    CHECK(struct_equal(rep.final_system->equation(0), simplify(V("x3"))));
    // independent confirmation: full structural rank at the end
    ZeroTestConfig cfg;
    DualSolution d = solve_assignment(signature(*rep.final_system, cfg));
    SystemJacobian jac = system_jacobian(*rep.final_system, d, cfg);
    CHECK(structural_rank(jac, cfg) == 3);
    // the estimate strictly decreases across iterations
    std::optional<long> prev;
    for (const IterationRecord& it : rep.iterations) {
        REQUIRE(it.dual.delta_hat.has_value());
        if (prev) CHECK(*it.dual.delta_hat < *prev);
        prev = it.dual.delta_hat;
    }
}

TEST_CASE("no perfect matching short-circuits the loop") {
    RelaxationOptions opts;
    ModificationReport rep = relax(make_no_matching_example(), opts);
    CHECK(rep.status == FinalStatus::NoPerfectMatching);
    CHECK(rep.modification_count() == 0);
}

TEST_CASE("full structural rank but singular at the only consistent point") {
    RelaxationOptions opts;
    ModificationReport rep = relax(make_point_singular_example(), opts);
    CHECK(rep.status == FinalStatus::PointSingularCandidate);
}

TEST_CASE("linear-combination mode fails gracefully where it must") {
    RelaxationOptions opts;
    opts.method = Method::LinearCombination;
    ModificationReport rep = relax(make_lcfail(), opts);
    CHECK(rep.status == FinalStatus::MethodFailure);
    CHECK(rep.failure_message.find("LCConditionError") != std::string::npos);
}

TEST_CASE("auto mode falls back to augmentation on transcendental blocks") {
    DaeSystem sys = load_instance("ringmod.dae");
    RelaxationOptions opts;
    opts.method = Method::Auto;
    // the selection that requires solving the exponential diode block
    opts.manual.r = 4;
    opts.manual.rows_I = {2, 3, 5};
    opts.manual.cols_J = {2, 3, 4};
    ModificationReport rep = relax(sys, opts);
    CHECK(rep.status == FinalStatus::Ok);
    REQUIRE_FALSE(rep.iterations.empty());
    CHECK(rep.iterations[0].method_used == "augmentation");
    CHECK(rep.iterations[0].aug_step.has_value());
}

TEST_CASE("manual dual offsets are validated") {
    RelaxationOptions opts;
    opts.manual.p = std::vector<long>{0, 0};
    opts.manual.q = std::vector<long>{0, 0}; // infeasible: orders are 1
    CHECK_THROWS_AS(relax(make_lcfail(), opts), InvalidSelectionError);
    opts.manual.p = std::vector<long>{0, 0};
    opts.manual.q = std::vector<long>{2, 1}; // feasible but not optimal
    CHECK_THROWS_AS(relax(make_lcfail(), opts), InvalidSelectionError);
}

TEST_CASE("manual pivots are validated") {
    RelaxationOptions opts;
    opts.manual.r = 0;
    opts.manual.rows_I = {2}; // D[{2}, {0}] is zero: (C1) fails
    opts.manual.cols_J = {0};
    CHECK_THROWS_AS(relax(make_intro(), opts), InvalidSelectionError);
}

TEST_CASE("iteration budget guards the loop") {
    DaeSystem sys = load_instance("pendulum.dae");
    RelaxationOptions opts;
    opts.method = Method::Augmentation;
    opts.max_iterations = 1; // this instance needs two modifications
    CHECK_THROWS_AS(relax(sys, opts), IterationBudgetExceededError);
    opts.max_iterations = 0; // default budget delta_hat + 1 suffices
    CHECK(relax(sys, opts).status == FinalStatus::Ok);
}

TEST_CASE("equivalence verification") {
    ZeroTestConfig cfg;
    SUBCASE("nonlinear failure example vs its substituted form") {
        RelaxationOptions opts;
        opts.method = Method::Substitution;
        ModificationReport rep = relax(make_lcfail(), opts);
        REQUIRE(rep.final_system);
        EquivalenceReport eq = verify_equivalence(
            make_lcfail(), *rep.final_system, make_lcfail_trajectory(), cfg);
        CHECK(eq.pass);
        CHECK(eq.max_residual_before <= 1e-9);
        CHECK(eq.max_residual_after <= 1e-9);
    }
    SUBCASE("linear example vs its substituted form, constant trajectory") {
        RelaxationOptions opts;
        opts.method = Method::Substitution;
        ModificationReport rep = relax(make_intro(), opts);
        REQUIRE(rep.final_system);
        TrajectoryFixture fix;
        fix.closed_forms["x1"] = N(1);
        fix.closed_forms["x2"] = N(0);
        fix.closed_forms["x3"] = N(0);
        for (int i = 0; i <= 10; ++i) fix.grid.push_back(0.1 * i);
        EquivalenceReport eq =
            verify_equivalence(make_intro(), *rep.final_system, fix, cfg);
        CHECK(eq.max_residual_before <= 1e-12);
        CHECK(eq.max_residual_after <= 1e-12);
    }
    SUBCASE("augmented system with recovered auxiliaries") {
        RelaxationOptions opts;
        opts.method = Method::Augmentation;
        ModificationReport rep = relax(make_lcfail(), opts);
        REQUIRE(rep.final_system);
        EquivalenceReport eq = verify_equivalence(
            make_lcfail(), *rep.final_system, make_lcfail_trajectory(), cfg);
        CHECK(eq.pass);
        CHECK(eq.max_residual_after <= 1e-8);
    }
}

TEST_CASE("final verdict matches an independent classification") {
    for (Method m : {Method::Substitution, Method::Augmentation}) {
        RelaxationOptions opts;
        opts.method = m;
        ModificationReport rep = relax(make_intro(), opts);
        REQUIRE(rep.final_system);
        ZeroTestConfig cfg;
        DualSolution d = solve_assignment(signature(*rep.final_system, cfg));
        SystemJacobian jac = system_jacobian(*rep.final_system, d, cfg);
        CHECK((rep.status == FinalStatus::Ok) ==
              (classify_failure(*rep.final_system, d, jac, cfg) ==
               FailureClass::Ok));
    }
}

} // TEST_SUITE
