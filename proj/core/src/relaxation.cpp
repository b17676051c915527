// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/relaxation.hpp>

#include <daerelax/errors.hpp>

#include <cmath>

namespace daerelax {

const char* method_name(Method m) {
    switch (m) {
    case Method::Substitution: return "substitution";
    case Method::Augmentation: return "augmentation";
    case Method::LinearCombination: return "lc";
    case Method::Auto: return "auto";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "sub" || name == "substitution") return Method::Substitution;
    if (name == "aug" || name == "augmentation") return Method::Augmentation;
    if (name == "lc") return Method::LinearCombination;
    if (name == "auto") return Method::Auto;
    return std::nullopt;
}

const char* final_status_name(FinalStatus s) {
    switch (s) {
    case FinalStatus::Ok: return "ok";
    case FinalStatus::NoPerfectMatching: return "no-perfect-matching";
    case FinalStatus::PointSingularCandidate:
        return "point-singular-candidate";
    case FinalStatus::MethodFailure: return "method-failure";
    }
    return "?";
}

namespace {

DualSolution manual_dual(const ManualSelection& manual,
                         const SignatureMatrix& sig,
                         const DualSolution& solved) {
    if (!manual.p || !manual.q)
        throw InvalidSelectionError(
            "manual dual offsets need both p and q");
    DualSolution dual;
    dual.p = *manual.p;
    dual.q = *manual.q;
    if (!dual.feasible_for(sig))
        throw InvalidSelectionError("manual dual offsets are infeasible");
    long value = 0;
    for (long v : dual.q) value += v;
    for (long v : dual.p) value -= v;
    if (!solved.delta_hat || value != *solved.delta_hat)
        throw InvalidSelectionError(
            "manual dual offsets are feasible but not optimal");
    dual.delta_hat = value;
    dual.optimal = true;
    return dual;
}

} // namespace

ModificationReport relax(const DaeSystem& sys_in,
                         const RelaxationOptions& opts) {
    DaeSystem cur = opts.base_point ? sys_in.with_base_point(*opts.base_point)
                                    : sys_in;
    cur.require_square();
    ModificationReport report;

    long budget = opts.max_iterations;
    std::size_t modifications = 0;
    for (std::size_t iter = 0;; ++iter) {
        ZeroTestConfig cfg = cur.analysis_config(opts.zero_test);
        IterationRecord rec;
        rec.sig = signature(cur, cfg);
        DualSolution solved = solve_assignment(rec.sig);
        bool use_manual = iter == 0 && opts.manual.has_dual();
        rec.dual = use_manual ? manual_dual(opts.manual, rec.sig, solved)
                              : solved;
        if (budget <= 0)
            budget = rec.dual.delta_hat ? *rec.dual.delta_hat + 1 : 1;

        if (!rec.dual.delta_hat) {
            report.iterations.push_back(std::move(rec));
            report.status = FinalStatus::NoPerfectMatching;
            report.failure_message = "the signature bipartite graph has no "
                                     "perfect matching";
            break;
        }
        SystemJacobian jac = system_jacobian(cur, rec.dual, cfg);
        RankAnalysis analysis = rank_and_pivot(cur, jac, cfg);
        rec.structural_rank = analysis.rank;
        const auto n = static_cast<int>(cur.equation_count());
        if (!analysis.pivot) {
            rec.verdict = FailureClass::Ok;
            if (cur.base_point()) {
                auto numeric = eval_matrix(jac.entries, *cur.base_point(),
                                           cur.params());
                report.final_determinant = numeric_determinant(numeric);
                if (numerically_singular(numeric))
                    rec.verdict = FailureClass::PointSingularCandidate;
            }
            report.final_delta = rec.dual.delta_hat;
            report.status = rec.verdict == FailureClass::PointSingularCandidate
                                ? FinalStatus::PointSingularCandidate
                                : FinalStatus::Ok;
            report.iterations.push_back(std::move(rec));
            break;
        }
        rec.verdict = FailureClass::IdenticallySingular;

        if (static_cast<long>(modifications) >= budget)
            throw IterationBudgetExceededError(
                "modification loop exceeded its iteration budget of " +
                std::to_string(budget));

        PivotChoice pivot;
        if (iter == 0 && opts.manual.has_pivot()) {
            pivot = complete_pivot(cur, rec.dual, *opts.manual.r,
                                   opts.manual.rows_I, opts.manual.cols_J);
            if (!pivot_satisfies_conditions(jac, pivot, cfg))
                throw InvalidSelectionError(
                    "manual pivot violates the selection conditions");
        } else if (opts.dynamic_pivoting && cur.base_point()) {
            pivot = repivot_at_point(cur, jac, *cur.base_point(), cfg);
        } else {
            pivot = *analysis.pivot;
        }
        rec.pivot = pivot;
        (void)n;

        try {
            switch (opts.method) {
            case Method::Substitution: {
                rec.sub_step = substitute_step(cur, rec.dual, pivot, cfg);
                rec.method_used = "substitution";
                cur = rec.sub_step->new_system;
                break;
            }
            case Method::LinearCombination: {
                rec.sub_step = lc_step(cur, rec.dual, pivot, cfg);
                rec.method_used = "lc";
                cur = rec.sub_step->new_system;
                break;
            }
            case Method::Augmentation: {
                rec.aug_step = augment_step(cur, rec.dual, pivot, opts.xi, cfg,
                                            static_cast<int>(modifications) + 1);
                rec.method_used = "augmentation";
                cur = rec.aug_step->new_system;
                break;
            }
            case Method::Auto: {
                try {
                    rec.sub_step = substitute_step(cur, rec.dual, pivot, cfg);
                    rec.method_used = "substitution";
                    cur = rec.sub_step->new_system;
                } catch (const NonlinearTargetsError&) {
                    rec.aug_step =
                        augment_step(cur, rec.dual, pivot, opts.xi, cfg,
                                     static_cast<int>(modifications) + 1);
                    rec.method_used = "augmentation";
                    cur = rec.aug_step->new_system;
                }
                break;
            }
            }
        } catch (const NonlinearTargetsError& e) {
            report.iterations.push_back(std::move(rec));
            report.status = FinalStatus::MethodFailure;
            report.failure_message = std::string("NonlinearTargetsError: ") +
                                     e.what();
            break;
        } catch (const LCConditionError& e) {
            report.iterations.push_back(std::move(rec));
            report.status = FinalStatus::MethodFailure;
            report.failure_message = std::string("LCConditionError: ") +
                                     e.what();
            break;
        } catch (const SingularAtConstructionError& e) {
            report.iterations.push_back(std::move(rec));
            report.status = FinalStatus::MethodFailure;
            report.failure_message =
                std::string("SingularAtConstructionError: ") + e.what();
            break;
        } catch (const XiSingularError& e) {
            report.iterations.push_back(std::move(rec));
            report.status = FinalStatus::MethodFailure;
            report.failure_message = std::string("XiSingularError: ") + e.what();
            break;
        }
        ++modifications;
        report.iterations.push_back(std::move(rec));
    }
    report.final_system = cur;
    return report;
}

EquivalenceReport verify_equivalence(const DaeSystem& before,
                                     const DaeSystem& after,
                                     const TrajectoryFixture& fix,
                                     const ZeroTestConfig& cfg,
                                     double threshold) {
    EquivalenceReport rep;
    rep.threshold = threshold;
    rep.max_residual_before = max_abs_residual(before, fix);
    TrajectoryFixture extended = fix;
    if (after.equation_count() > before.equation_count()) {
        std::size_t k = after.equation_count() - before.equation_count();
        if (after.aux_vars().size() < k)
            throw Error("appended rows do not match appended auxiliaries");
        std::vector<std::string> aux(after.aux_vars().end() - k,
                                     after.aux_vars().end());
        std::vector<Expr> eqs(after.equations().end() - k,
                              after.equations().end());
        extended = extend_fixture_with_aux(after, fix, eqs, aux, cfg);
    }
    rep.max_residual_after = max_abs_residual(after, extended);
    rep.pass = rep.max_residual_before <= threshold &&
               rep.max_residual_after <= threshold;
    return rep;
}

} // namespace daerelax
