// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/augmentation.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>
#include <daerelax/substitution.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace daerelax {

namespace {

std::string fresh_aux_name(const DaeSystem& sys, std::size_t col_index,
                           int iteration) {
    std::string base = "y" + std::to_string(col_index + 1) + "_" +
                       std::to_string(iteration);
    std::set<std::string> taken(sys.variables().begin(), sys.variables().end());
    taken.insert(sys.aux_vars().begin(), sys.aux_vars().end());
    std::string name = base;
    while (taken.count(name)) name += "_";
    return name;
}

bool frozen_block_singular(const DaeSystem& sys, const DualSolution& dual,
                           const PivotChoice& pivot, const SubstMap& frozen,
                           const ZeroTestConfig& cfg) {
    const std::size_t m = pivot.rows_I.size();
    ExprMatrix block(m, std::vector<Expr>(m));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            std::size_t i = pivot.rows_I[a];
            std::size_t j = pivot.cols_J[b];
            long k = dual.q[j] - dual.p[i];
            Column col = sys.column(j);
            Expr entry = (k < 0)
                             ? Expr::num(0)
                             : partial(sys.equation(i),
                                       col.slot(static_cast<int>(k)));
            block[a][b] = simplify(substitute(entry, frozen));
        }
    }
    if (sys.base_point()) {
        auto numeric = eval_matrix(block, *sys.base_point(), sys.params());
        return numerically_singular(numeric);
    }
    return symbolic_rank(block, cfg) < static_cast<int>(m);
}

} // namespace

AugmentationStep augment_step(const DaeSystem& sys, const DualSolution& dual,
                              const PivotChoice& pivot,
                              const std::map<std::string, double>& xi_explicit,
                              const ZeroTestConfig& cfg_in, int iteration) {
    sys.require_square();
    if (!dual.delta_hat)
        throw InvalidSelectionError("augmentation needs an optimal dual");
    if (pivot.rows_I.empty())
        throw InvalidSelectionError("the copied row set cannot be empty");
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    const std::size_t n = sys.equation_count();
    const std::size_t m = pivot.rows_I.size();
    const long pr = dual.p[pivot.r];
    if (iteration < 0) iteration = static_cast<int>(sys.aux_vars().size()) + 1;

    for (const auto& [name, value] : xi_explicit) {
        bool known = std::find(sys.variables().begin(), sys.variables().end(),
                               name) != sys.variables().end() ||
                     std::find(sys.aux_vars().begin(), sys.aux_vars().end(),
                               name) != sys.aux_vars().end();
        if (!known)
            throw MissingXiValueError("xi value names unknown column '" +
                                      name + "'");
        (void)value;
    }

    std::vector<Expr> copies = reduced_system(sys, dual, pivot);

    // slots to replace: x_j^(q_j - p_r) over all columns
    std::set<std::size_t> in_J(pivot.cols_J.begin(), pivot.cols_J.end());
    std::vector<std::pair<VarSlot, double>> frozen_defaulted;
    std::map<VarSlot, double> xi;
    SubstMap psi;
    std::vector<std::string> new_aux(pivot.cols_J.size());
    for (std::size_t idx = 0; idx < pivot.cols_J.size(); ++idx) {
        std::size_t j = pivot.cols_J[idx];
        long k = dual.q[j] - pr;
        Column col = sys.column(j);
        if (k < 0)
            throw InvalidSelectionError("pivot block column carries no "
                                        "admissible replacement order");
        new_aux[idx] = fresh_aux_name(sys, j, iteration);
        psi.emplace(col.slot(static_cast<int>(k)), Expr::aux(new_aux[idx]));
    }
    for (std::size_t j : pivot.cols_T) {
        long k = dual.q[j] - pr;
        Column col = sys.column(j);
        if (k < 0) continue;
        VarSlot slot = col.slot(static_cast<int>(k));
        bool occurs_anywhere = occurs(sys.equation(pivot.r), slot);
        for (const Expr& c : copies)
            occurs_anywhere = occurs_anywhere || occurs(c, slot);
        if (!occurs_anywhere) continue;
        double value = 0.0;
        bool adjustable = true;
        if (auto it = xi_explicit.find(col.name); it != xi_explicit.end()) {
            value = it->second;
            adjustable = false; // user-chosen constants are never overridden
        } else if (sys.base_point() && sys.base_point()->get(slot)) {
            value = *sys.base_point()->get(slot);
        }
        xi[slot] = value;
        if (adjustable) frozen_defaulted.emplace_back(slot, value);
    }

    auto build_frozen_map = [&]() {
        SubstMap frozen;
        for (const auto& [slot, v] : xi)
            frozen.emplace(slot, Expr::num(rational_from_double(v)));
        return frozen;
    };
    // retry ladder when the frozen block degenerates: bump the adjustable
    // constants to 1, then to distinct small values
    for (int attempt = 0;; ++attempt) {
        if (!frozen_block_singular(sys, dual, pivot, build_frozen_map(), cfg))
            break;
        if (frozen_defaulted.empty() || attempt >= 2)
            throw XiSingularError(
                "pivot block is singular under the frozen constants");
        double k = 0;
        for (auto& [slot, v] : frozen_defaulted) {
            xi[slot] = attempt == 0 ? 1.0 : 2.0 + k;
            k += 1.0;
        }
    }
    SubstMap frozen = build_frozen_map();
    SubstMap replace = psi;
    for (const auto& [slot, e] : frozen) replace.emplace(slot, e);

    Expr new_fr = simplify(substitute(sys.equation(pivot.r), replace));
    std::vector<Expr> appended;
    appended.reserve(m);
    for (const Expr& c : copies)
        appended.push_back(simplify(substitute(c, replace)));

    // extended base point: the new variables take the values of the slots
    // they replace
    std::optional<Point> new_base = sys.base_point();
    if (new_base) {
        for (std::size_t idx = 0; idx < pivot.cols_J.size(); ++idx) {
            std::size_t j = pivot.cols_J[idx];
            long k = dual.q[j] - pr;
            VarSlot slot = sys.column(j).slot(static_cast<int>(k));
            double v = new_base->get(slot).value_or(0.0);
            new_base->set(VarSlot::of_aux(new_aux[idx]), v);
        }
    }

    std::vector<Expr> eqs = sys.equations();
    eqs[pivot.r] = new_fr;
    eqs.insert(eqs.end(), appended.begin(), appended.end());
    std::vector<std::string> all_aux = sys.aux_vars();
    all_aux.insert(all_aux.end(), new_aux.begin(), new_aux.end());
    DaeSystem new_sys(std::move(eqs), sys.variables(), sys.params(),
                      std::move(new_base), std::move(all_aux));

    AugmentationStep step{.pivot = pivot,
                          .xi = xi,
                          .new_aux = new_aux,
                          .new_system = new_sys,
                          .p_bar = dual.p,
                          .q_bar = dual.q,
                          .delta_before = *dual.delta_hat,
                          .delta_after = std::nullopt};
    for (std::size_t i = 0; i < m; ++i) {
        step.p_bar.push_back(pr);
        step.q_bar.push_back(pr);
    }

    // -- guarantees of the construction, verified at runtime --
    SignatureMatrix sig = signature(new_sys, cfg);
    DualSolution extended;
    extended.p = step.p_bar;
    extended.q = step.q_bar;
    extended.delta_hat = step.delta_before; // value irrelevant for feasibility
    extended.optimal = false;
    if (!extended.feasible_for(sig))
        throw PostconditionViolationError(
            "extended dual is not feasible on the augmented system");
    // strict order drop in the rewritten row and the copies, original columns
    std::vector<std::size_t> changed_rows{pivot.r};
    for (std::size_t i = 0; i < m; ++i) changed_rows.push_back(n + i);
    for (std::size_t i : changed_rows) {
        for (std::size_t j = 0; j < sys.column_count(); ++j) {
            auto c = sig.at(i, j);
            if (c && *c >= dual.q[j] - pr)
                throw PostconditionViolationError(
                    "replaced derivative order did not drop in row " +
                    std::to_string(i + 1));
        }
    }
    SystemJacobian jac_bar = system_jacobian(new_sys, extended, cfg);
    for (std::size_t i : changed_rows)
        for (std::size_t j = 0; j < sys.column_count(); ++j)
            if (jac_bar.pattern[i][j])
                throw PostconditionViolationError(
                    "augmented Jacobian has a nonzero in a replaced row");
    for (std::size_t i = 0; i < n; ++i) {
        if (i == pivot.r) continue;
        for (std::size_t j = sys.column_count(); j < new_sys.column_count(); ++j)
            if (jac_bar.pattern[i][j])
                throw PostconditionViolationError(
                    "augmented Jacobian couples an original row to a new "
                    "variable");
    }
    if (term_rank(jac_bar) > static_cast<int>(n + m - 1))
        throw PostconditionViolationError(
            "augmented Jacobian exceeds the term-rank cover bound");
    DualSolution resolved = solve_assignment(sig);
    step.delta_after = resolved.delta_hat;
    if (step.delta_after && *step.delta_after > step.delta_before - 1)
        throw PostconditionViolationError(
            "structural degree estimate did not strictly decrease under "
            "augmentation");
    return step;
}

// ------------------------------------------------------------- recovery

namespace {

struct RecoveryProblem {
    std::vector<Expr> equations; // substituted: depend on t, aux, leftovers
    std::vector<VarSlot> unknowns;
    std::map<std::string, const std::vector<double>*> leftover_tables;
};

TrajectoryFixture newton_recover(const DaeSystem& sys,
                                 const TrajectoryFixture& fix,
                                 const RecoveryProblem& prob,
                                 const std::map<std::string, Expr>& hints) {
    const std::size_t m = prob.unknowns.size();
    std::vector<std::vector<Expr>> jac(m, std::vector<Expr>(m));
    for (std::size_t e = 0; e < m; ++e)
        for (std::size_t k = 0; k < m; ++k)
            jac[e][k] = partial(prob.equations[e], prob.unknowns[k]);

    TrajectoryFixture out = fix;
    std::vector<std::vector<double>> columns(m,
                                             std::vector<double>(fix.grid.size()));
    for (std::size_t g = 0; g < fix.grid.size(); ++g) {
        double t = fix.grid[g];
        std::map<VarSlot, double> slots;
        for (const auto& [name, table] : prob.leftover_tables)
            slots[VarSlot::of_aux(name)] = (*table)[g];
        auto eval_with = [&](const Expr& e, const Eigen::VectorXd& y) {
            for (std::size_t k = 0; k < m; ++k)
                slots[prob.unknowns[k]] = y(static_cast<Eigen::Index>(k));
            EvalEnv env;
            env.t = t;
            env.slots = &slots;
            env.params = &sys.params();
            return eval(e, env);
        };
        auto residual_norm = [&](const Eigen::VectorXd& y) {
            double r = 0;
            for (const Expr& e : prob.equations)
                r = std::max(r, std::abs(eval_with(e, y)));
            return r;
        };
        bool converged = false;
        for (double start : {0.0, 1.0}) {
            Eigen::VectorXd y(m);
            for (std::size_t k = 0; k < m; ++k) {
                auto h = hints.find(prob.unknowns[k].name);
                if (h != hints.end()) {
                    EvalEnv env;
                    env.t = t;
                    env.params = &sys.params();
                    y(static_cast<Eigen::Index>(k)) = eval(h->second, env);
                } else {
                    y(static_cast<Eigen::Index>(k)) = start;
                }
            }
            try {
                for (int it = 0; it < 100 && !converged; ++it) {
                    Eigen::VectorXd f(m);
                    for (std::size_t e = 0; e < m; ++e)
                        f(static_cast<Eigen::Index>(e)) =
                            eval_with(prob.equations[e], y);
                    if (f.lpNorm<Eigen::Infinity>() <= 1e-12) {
                        converged = true;
                        break;
                    }
                    Eigen::MatrixXd J(m, m);
                    for (std::size_t e = 0; e < m; ++e)
                        for (std::size_t k = 0; k < m; ++k)
                            J(static_cast<Eigen::Index>(e),
                              static_cast<Eigen::Index>(k)) =
                                eval_with(jac[e][k], y);
                    Eigen::VectorXd dy = J.fullPivLu().solve(-f);
                    double base = f.lpNorm<Eigen::Infinity>();
                    double s = 1.0;
                    while (s > 1e-8) {
                        if (residual_norm(y + s * dy) < base) break;
                        s *= 0.5;
                    }
                    y += s * dy;
                }
            } catch (const EvalDomainError&) {
                converged = false;
            }
            if (converged) {
                for (std::size_t k = 0; k < m; ++k)
                    columns[k][g] = y(static_cast<Eigen::Index>(k));
                break;
            }
        }
        if (!converged)
            throw NonlinearTargetsError(
                "auxiliary recovery is not affine and the damped Newton "
                "iteration failed to converge at t = " + std::to_string(t));
    }
    for (std::size_t k = 0; k < m; ++k)
        out.aux_numeric[prob.unknowns[k].name] = columns[k];
    return out;
}

} // namespace

TrajectoryFixture extend_fixture_with_aux(const DaeSystem& sys,
                                          const TrajectoryFixture& fix,
                                          const std::vector<Expr>& equations,
                                          const std::vector<std::string>& aux_names,
                                          const ZeroTestConfig& cfg_in) {
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    RecoveryProblem prob;
    for (const std::string& a : aux_names)
        prob.unknowns.push_back(VarSlot::of_aux(a));
    if (equations.size() != prob.unknowns.size())
        throw Error("aux recovery needs as many equations as unknowns");

    // substitute closed forms for everything except the unknowns
    std::set<std::string> unknown_names(aux_names.begin(), aux_names.end());
    bool symbolic_ok = true;
    SubstMap closed;
    for (const Expr& eq : equations) {
        for (const VarSlot& s : collect_support(eq).slots) {
            if (s.aux && unknown_names.count(s.name)) continue;
            if (closed.count(s)) continue;
            auto cf = fix.closed_forms.find(s.name);
            if (cf != fix.closed_forms.end()) {
                closed.emplace(s, s.aux ? cf->second
                                        : total_derivative(cf->second, s.order));
            } else if (s.aux && fix.aux_numeric.count(s.name)) {
                symbolic_ok = false;
                prob.leftover_tables[s.name] = &fix.aux_numeric.at(s.name);
            } else {
                throw MissingClosedFormError(
                    "trajectory fixture does not cover '" + s.name + "'");
            }
        }
    }
    for (const Expr& eq : equations)
        prob.equations.push_back(simplify(substitute(eq, closed)));

    if (symbolic_ok) {
        // affine in the unknowns? then a closed-form solve works
        try {
            SubstMap solved =
                solve_targets(prob.equations, prob.unknowns, cfg);
            TrajectoryFixture out = fix;
            for (const auto& [slot, e] : solved)
                out.closed_forms[slot.name] = e;
            return out;
        } catch (const NonlinearTargetsError&) {
            // fall through to the numeric route
        }
    }
    return newton_recover(sys, fix, prob, {});
}

TrajectoryFixture recover_aux_trajectory(const AugmentationStep& step,
                                         const TrajectoryFixture& fix,
                                         const ZeroTestConfig& cfg) {
    const DaeSystem& sys = step.new_system;
    const std::size_t n_before =
        sys.equation_count() - step.new_aux.size();
    std::vector<Expr> copies(sys.equations().begin() +
                                 static_cast<long>(n_before),
                             sys.equations().end());
    return extend_fixture_with_aux(sys, fix, copies, step.new_aux, cfg);
}

} // namespace daerelax
