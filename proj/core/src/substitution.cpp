// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/substitution.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <algorithm>

namespace daerelax {

std::vector<Expr> reduced_system(const DaeSystem& sys, const DualSolution& dual,
                                 const PivotChoice& pivot) {
    std::vector<Expr> out;
    out.reserve(pivot.rows_I.size());
    long pr = dual.p[pivot.r];
    for (std::size_t i : pivot.rows_I) {
        long d = dual.p[i] - pr;
        if (d < 0)
            throw InvalidSelectionError(
                "pivot row must carry the minimal offset");
        out.push_back(total_derivative(sys.equation(i), static_cast<int>(d)));
    }
    return out;
}

std::vector<VarSlot> target_slots(const DaeSystem& sys,
                                  const DualSolution& dual,
                                  const PivotChoice& pivot) {
    std::vector<VarSlot> targets;
    long pr = dual.p[pivot.r];
    for (std::size_t j : pivot.cols_J) {
        long k = dual.q[j] - pr;
        Column col = sys.column(j);
        if (k < 0)
            throw InvalidSelectionError(
                "pivot block column carries no admissible target order");
        targets.push_back(col.slot(static_cast<int>(k)));
    }
    return targets;
}

SubstMap solve_targets(const std::vector<Expr>& reduced,
                       const std::vector<VarSlot>& targets,
                       const ZeroTestConfig& cfg) {
    const std::size_t m = reduced.size();
    if (targets.size() != m)
        throw Error("solve_targets: |reduced| must equal |targets|");
    // affinity: all second partials w.r.t. targets vanish
    for (const Expr& eq : reduced) {
        for (std::size_t a = 0; a < m; ++a) {
            Expr da = partial(eq, targets[a]);
            if (da.is_zero()) continue;
            for (std::size_t b = a; b < m; ++b) {
                if (!entry_is_zero(partial(da, targets[b]), cfg))
                    throw NonlinearTargetsError(
                        "equation is not affine in target " +
                        targets[b].name + "^(" +
                        std::to_string(targets[b].order) + "): " +
                        eq.to_string());
            }
        }
    }
    ExprMatrix a(m, std::vector<Expr>(m));
    std::vector<Expr> rhs(m);
    SubstMap zeros;
    for (const VarSlot& t : targets) zeros.emplace(t, Expr::num(0));
    for (std::size_t e = 0; e < m; ++e) {
        for (std::size_t k = 0; k < m; ++k)
            a[e][k] = partial(reduced[e], targets[k]);
        rhs[e] = simplify(Expr::neg(substitute(reduced[e], zeros)));
    }
    std::vector<Expr> solved = solve_linear(std::move(a), std::move(rhs), cfg);
    SubstMap out;
    for (std::size_t k = 0; k < m; ++k) {
        // phantom target occurrences must at least vanish as functions
        for (const VarSlot& t : targets) {
            if (occurs(solved[k], t) &&
                !entry_is_zero(partial(solved[k], t), cfg))
                throw PostconditionViolationError(
                    "solved expression still depends on a target");
        }
        out.emplace(targets[k], solved[k]);
    }
    return out;
}

namespace {

void check_vanishing_orders(const DaeSystem& sys, const DualSolution& dual,
                            const PivotChoice& pivot, const Expr& new_fr,
                            const ZeroTestConfig& cfg) {
    long pr = dual.p[pivot.r];
    for (std::size_t j = 0; j < sys.column_count(); ++j) {
        long k = dual.q[j] - pr;
        if (k < 0) continue;
        Column col = sys.column(j);
        Expr d = partial(new_fr, col.slot(static_cast<int>(k)));
        if (!entry_is_zero(d, cfg))
            throw PostconditionViolationError(
                "modified equation still depends on " + col.name + "^(" +
                std::to_string(k) + ")");
    }
}

std::optional<long> checked_delta_decrease(const DaeSystem& new_sys,
                                           long delta_before,
                                           const ZeroTestConfig& cfg) {
    std::optional<long> after = delta_hat(new_sys, cfg);
    if (after && *after > delta_before - 1)
        throw PostconditionViolationError(
            "structural degree estimate did not strictly decrease: " +
            std::to_string(delta_before) + " -> " + std::to_string(*after));
    return after;
}

} // namespace

SubstitutionStep substitute_step(const DaeSystem& sys, const DualSolution& dual,
                                 const PivotChoice& pivot,
                                 const ZeroTestConfig& cfg_in) {
    sys.require_square();
    if (!dual.delta_hat)
        throw InvalidSelectionError("substitution needs an optimal dual");
    if (pivot.rows_I.empty())
        throw InvalidSelectionError("the reduced row set cannot be empty");
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    SubstitutionStep step{.pivot = pivot,
                          .targets = target_slots(sys, dual, pivot),
                          .reduced = reduced_system(sys, dual, pivot),
                          .explicit_map = {},
                          .new_fr = Expr::num(0),
                          .new_system = sys,
                          .delta_before = *dual.delta_hat,
                          .delta_after = std::nullopt,
                          .lc_coefficients = std::nullopt};
    step.explicit_map = solve_targets(step.reduced, step.targets, cfg);
    step.new_fr =
        simplify(substitute(sys.equation(pivot.r), step.explicit_map));
    check_vanishing_orders(sys, dual, pivot, step.new_fr, cfg);
    step.new_system = sys.with_equation(pivot.r, step.new_fr);
    step.delta_after = checked_delta_decrease(step.new_system,
                                              step.delta_before, cfg);
    return step;
}

SubstitutionStep lc_step(const DaeSystem& sys, const DualSolution& dual,
                         const PivotChoice& pivot,
                         const ZeroTestConfig& cfg_in) {
    sys.require_square();
    if (!dual.delta_hat)
        throw InvalidSelectionError("the LC route needs an optimal dual");
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    const std::size_t m = pivot.rows_I.size();
    long pr = dual.p[pivot.r];

    // D restricted to the pivot block and to the pivot row
    auto entry = [&](std::size_t i, std::size_t j) {
        long k = dual.q[j] - dual.p[i];
        Column col = sys.column(j);
        if (k < 0) return Expr::num(0);
        return partial(sys.equation(i), col.slot(static_cast<int>(k)));
    };
    ExprMatrix block(m, std::vector<Expr>(m));
    std::vector<Expr> row_r(m);
    for (std::size_t a = 0; a < m; ++a) {
        row_r[a] = entry(pivot.r, pivot.cols_J[a]);
        for (std::size_t b = 0; b < m; ++b)
            block[a][b] = entry(pivot.rows_I[a], pivot.cols_J[b]);
    }
    ExprMatrix inv = symbolic_inverse(block, cfg);
    std::vector<Expr> u(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Expr> terms;
        for (std::size_t j = 0; j < m; ++j)
            terms.push_back(row_r[j] * inv[j][i]);
        u[i] = simplify(Expr::neg(Expr::sum(std::move(terms))));
    }

    // validity: every coefficient's order in x_j stays below q_j - p_r
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < sys.column_count(); ++j) {
            Column col = sys.column(j);
            std::optional<int> ord =
                col.aux ? sigma_order_aux(u[i], col.name, cfg)
                        : sigma_order(u[i], col.name, cfg);
            if (ord && *ord >= dual.q[j] - pr)
                throw LCConditionError(
                    "combination coefficient for row " +
                    std::to_string(pivot.rows_I[i] + 1) + " depends on " +
                    col.name + "^(" + std::to_string(*ord) +
                    "), not below order " + std::to_string(dual.q[j] - pr));
        }
    }

    SubstitutionStep step{.pivot = pivot,
                          .targets = target_slots(sys, dual, pivot),
                          .reduced = reduced_system(sys, dual, pivot),
                          .explicit_map = {},
                          .new_fr = Expr::num(0),
                          .new_system = sys,
                          .delta_before = *dual.delta_hat,
                          .delta_after = std::nullopt,
                          .lc_coefficients = u};
    std::vector<Expr> combo{sys.equation(pivot.r)};
    for (std::size_t i = 0; i < m; ++i)
        combo.push_back(u[i] * step.reduced[i]);
    step.new_fr = simplify(Expr::sum(std::move(combo)));
    check_vanishing_orders(sys, dual, pivot, step.new_fr, cfg);
    step.new_system = sys.with_equation(pivot.r, step.new_fr);
    step.delta_after = checked_delta_decrease(step.new_system,
                                              step.delta_before, cfg);
    return step;
}

} // namespace daerelax
