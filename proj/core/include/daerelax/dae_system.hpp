// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_DAE_SYSTEM_HPP
#define DAERELAX_DAE_SYSTEM_HPP

#include <daerelax/expr.hpp>
#include <daerelax/point.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace daerelax {

/// A Jacobian / signature column: a differential variable or an algebraic
/// auxiliary introduced by augmentation.
struct Column {
    std::string name;
    bool aux = false;

    VarSlot slot(int order) const {
        return aux ? VarSlot::of_aux(name, order) : VarSlot::of_var(name, order);
    }
    Expr expr(int order) const {
        return aux ? Expr::aux(name, order) : Expr::var(name, order);
    }
};

/// An ordered system of equations F_i = 0 over declared variables, with
/// parameter bindings and an optional base point. Immutable after
/// construction; modification steps build new systems.
class DaeSystem {
public:
    DaeSystem(std::vector<Expr> equations, std::vector<std::string> variables,
              std::map<std::string, double> params = {},
              std::optional<Point> base_point = std::nullopt,
              std::vector<std::string> aux_vars = {});

    std::size_t equation_count() const { return equations_.size(); }
    std::size_t column_count() const {
        return variables_.size() + aux_vars_.size();
    }
    const std::vector<Expr>& equations() const { return equations_; }
    const Expr& equation(std::size_t i) const;
    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::string>& aux_vars() const { return aux_vars_; }
    const std::map<std::string, double>& params() const { return params_; }
    const std::optional<Point>& base_point() const { return base_point_; }

    /// Highest derivative order occurring in any equation (computed, never
    /// user-supplied).
    int order() const { return order_; }

    bool square() const { return equation_count() == column_count(); }
    void require_square() const;

    std::vector<Column> columns() const;
    Column column(std::size_t j) const;

    DaeSystem with_equation(std::size_t i, Expr replacement) const;
    DaeSystem with_rows_appended(std::vector<Expr> rows,
                                 std::vector<std::string> new_aux,
                                 std::optional<Point> new_base) const;
    DaeSystem with_base_point(std::optional<Point> p) const;

    /// Copies the zero-test configuration, centering the sampling box on the
    /// system base point and binding the system parameters.
    ZeroTestConfig analysis_config(ZeroTestConfig base) const;

private:
    std::vector<Expr> equations_;
    std::vector<std::string> variables_;
    std::vector<std::string> aux_vars_;
    std::map<std::string, double> params_;
    std::optional<Point> base_point_;
    int order_ = 0;
};

/// Equations restricted to I, in index order.
std::vector<Expr> subsystem(const DaeSystem& sys,
                            const std::vector<std::size_t>& rows);

/// A closed-form trajectory (expressions in t only) on a time grid, used to
/// check that modified systems keep the original solution set. Auxiliary
/// variables may instead carry per-grid-point numeric values.
struct TrajectoryFixture {
    std::map<std::string, Expr> closed_forms;
    std::vector<double> grid;
    std::map<std::string, std::vector<double>> aux_numeric;
};

/// Residual matrix, |grid| x |equations|: every equation evaluated along the
/// trajectory, derivatives obtained by differentiating the closed forms.
std::vector<std::vector<double>>
residuals(const DaeSystem& sys, const TrajectoryFixture& fix);

double max_abs_residual(const DaeSystem& sys, const TrajectoryFixture& fix);

} // namespace daerelax

#endif
