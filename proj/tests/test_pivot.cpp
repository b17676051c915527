#include <doctest.h>

#include "support.hpp"

#include <daerelax/pivot.hpp>

using namespace dtest;

namespace {

struct Analysis {
    DaeSystem sys;
    DualSolution dual;
    SystemJacobian jac;
};

Analysis analyze(const DaeSystem& sys, const ZeroTestConfig& cfg) {
    DualSolution d = solve_assignment(signature(sys, cfg));
    SystemJacobian jac = system_jacobian(sys, d, cfg);
    return {sys, d, jac};
}

/// Exhaustive (r, I, J) search validating the selection conditions, the
/// independent oracle for the deterministic finder.
std::vector<PivotChoice> all_valid_pivots(const Analysis& an,
                                          const ZeroTestConfig& cfg) {
    std::vector<PivotChoice> out;
    const std::size_t n = an.sys.equation_count();
    for (std::size_t r = 0; r < n; ++r) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (mask & (1u << r)) continue;
            std::vector<std::size_t> I;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) I.push_back(i);
            if (I.empty()) continue;
            for (unsigned cmask = 0; cmask < (1u << n); ++cmask) {
                std::vector<std::size_t> J;
                for (std::size_t j = 0; j < n; ++j)
                    if (cmask & (1u << j)) J.push_back(j);
                if (J.size() != I.size()) continue;
                PivotChoice pc = complete_pivot(an.sys, an.dual, r, I, J);
                if (pivot_satisfies_conditions(an.jac, pc, cfg))
                    out.push_back(pc);
            }
        }
    }
    return out;
}

} // namespace

TEST_SUITE("pivot") {

TEST_CASE("linear example selection is valid and deterministic") {
    ZeroTestConfig cfg;
    Analysis an = analyze(make_intro(), cfg);
    PivotChoice pc = find_pivot(an.sys, an.jac, cfg);
    // frozen deterministic output, validated against the exhaustive oracle
    CHECK(pc.r == 0);
    CHECK(pc.rows_I == std::vector<std::size_t>{1});
    CHECK(pc.cols_J == std::vector<std::size_t>{0});
    CHECK(pc.kappa == 0);
    CHECK(pc.rows_S == std::vector<std::size_t>{2});
    CHECK(pc.cols_T == (std::vector<std::size_t>{1, 2}));
    CHECK(pivot_satisfies_conditions(an.jac, pc, cfg));
    auto all = all_valid_pivots(an, cfg);
    CHECK(all.size() > 1); // several admissible answers exist
    PivotChoice again = find_pivot(an.sys, an.jac, cfg);
    CHECK(again.r == pc.r);
    CHECK(again.rows_I == pc.rows_I);
    CHECK(again.cols_J == pc.cols_J);
}

TEST_CASE("nonlinear failure example prefers the solvable pivot row") {
    ZeroTestConfig cfg;
    Analysis an = analyze(make_lcfail(), cfg);
    PivotChoice pc = find_pivot(an.sys, an.jac, cfg);
    CHECK(pc.r == 1);
    CHECK(pc.rows_I == std::vector<std::size_t>{0});
    CHECK(pc.cols_J == std::vector<std::size_t>{0});
    CHECK(pc.targets_affine);
    CHECK(pivot_satisfies_conditions(an.jac, pc, cfg));
}

TEST_CASE("transistor amplifier selection") {
    ZeroTestConfig cfg;
    Analysis an = analyze(load_instance("transamp.dae"), cfg);
    PivotChoice pc = find_pivot(an.sys, an.jac, cfg);
    CHECK(pc.r == 0);
    CHECK(pc.rows_I == std::vector<std::size_t>{1});
    CHECK(pc.cols_J == std::vector<std::size_t>{0});
    CHECK(pivot_satisfies_conditions(an.jac, pc, cfg));
}

TEST_CASE("the dependent row set splits rank as the elimination promises") {
    Rng rng(137);
    ZeroTestConfig cfg;
    int done = 0;
    for (int it = 0; it < 60 && done < 25; ++it) {
        DaeSystem sys =
            make_degenerate_system(rng, static_cast<std::size_t>(rng.integer(2, 4)));
        Analysis an = analyze(sys, cfg);
        if (!an.dual.delta_hat) continue;
        RankAnalysis ra = rank_and_pivot(sys, an.jac, cfg);
        if (!ra.pivot) continue; // generator produced a healthy instance
        ++done;
        std::vector<std::size_t> Z = ra.pivot->rows_I;
        Z.push_back(ra.pivot->r);
        std::sort(Z.begin(), Z.end());
        ExprMatrix zrows;
        for (std::size_t i : Z) zrows.push_back(an.jac.entries[i]);
        CHECK(symbolic_rank(zrows, cfg) ==
              static_cast<int>(Z.size()) - 1);
        // every maximal proper subset keeps full row rank
        for (std::size_t drop = 0; drop < Z.size(); ++drop) {
            ExprMatrix sub;
            for (std::size_t k = 0; k < Z.size(); ++k)
                if (k != drop) sub.push_back(an.jac.entries[Z[k]]);
            CHECK(symbolic_rank(sub, cfg) == static_cast<int>(sub.size()));
        }
        CHECK(pivot_satisfies_conditions(an.jac, *ra.pivot, cfg));
        CHECK(ra.pivot->kappa <=
              static_cast<long>(sys.equation_count()) * sys.order());
    }
    CHECK(done >= 25);
}

TEST_CASE("dynamic pivoting prefers the better-conditioned block") {
    ZeroTestConfig cfg;
    Analysis an = analyze(make_lcfail(), cfg);
    SUBCASE("tiny pivot entry pushes the block to the other column") {
        Point p;
        p.t = 0.3;
        p.values[VarSlot::of_var("x1", 1)] = 1.0;
        p.values[VarSlot::of_var("x2", 1)] = 1e-9;
        PivotChoice pc = repivot_at_point(an.sys, an.jac, p, cfg);
        CHECK(pc.r == 1);
        CHECK(pc.rows_I == std::vector<std::size_t>{0});
        CHECK(pc.cols_J == std::vector<std::size_t>{1});
    }
    SUBCASE("agrees with the static choice when it is already maximal") {
        Point p;
        p.t = 0.3;
        p.values[VarSlot::of_var("x1", 1)] = 1e-9;
        p.values[VarSlot::of_var("x2", 1)] = 2.0;
        PivotChoice pc = repivot_at_point(an.sys, an.jac, p, cfg);
        CHECK(pc.cols_J == find_pivot(an.sys, an.jac, cfg).cols_J);
    }
    SUBCASE("block singular at the point but not identically") {
        Point p;
        p.t = 0.0;
        p.values[VarSlot::of_var("x1", 1)] = 1.0;
        p.values[VarSlot::of_var("x2", 1)] = 0.0; // x2' vanishes here
        PivotChoice pc = repivot_at_point(an.sys, an.jac, p, cfg);
        CHECK(pc.cols_J == std::vector<std::size_t>{1});
    }
}

TEST_CASE("manual selections are validated") {
    ZeroTestConfig cfg;
    Analysis an = analyze(make_intro(), cfg);
    // (C1) violated: D[{2}, {0}] is the zero entry
    PivotChoice bad = complete_pivot(an.sys, an.dual, 0, {2}, {0});
    CHECK_FALSE(pivot_satisfies_conditions(an.jac, bad, cfg));
    // mismatched sizes rejected at completion
    CHECK_THROWS_AS(complete_pivot(an.sys, an.dual, 0, {1, 2}, {0}),
                    InvalidSelectionError);
}

} // TEST_SUITE
