// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/dae_system.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace daerelax {

DaeSystem::DaeSystem(std::vector<Expr> equations,
                     std::vector<std::string> variables,
                     std::map<std::string, double> params,
                     std::optional<Point> base_point,
                     std::vector<std::string> aux_vars)
    : equations_(std::move(equations)), variables_(std::move(variables)),
      aux_vars_(std::move(aux_vars)), params_(std::move(params)),
      base_point_(std::move(base_point)) {
    std::set<std::string> vars(variables_.begin(), variables_.end());
    std::set<std::string> auxs(aux_vars_.begin(), aux_vars_.end());
    if (vars.size() != variables_.size() || auxs.size() != aux_vars_.size())
        throw Error("duplicate variable declaration");
    for (const std::string& a : aux_vars_)
        if (vars.count(a)) throw Error("name declared both var and aux: " + a);
    for (std::size_t i = 0; i < equations_.size(); ++i) {
        ExprSupport sup = collect_support(equations_[i]);
        for (const VarSlot& s : sup.slots) {
            if (s.aux) {
                if (!auxs.count(s.name))
                    throw Error("equation " + std::to_string(i + 1) +
                                " references undeclared auxiliary '" + s.name +
                                "'");
            } else {
                if (!vars.count(s.name))
                    throw Error("equation " + std::to_string(i + 1) +
                                " references undeclared variable '" + s.name +
                                "'");
            }
        }
        order_ = std::max(order_, equations_[i].max_var_order());
    }
    order_ = std::max(order_, 0);
}

const Expr& DaeSystem::equation(std::size_t i) const {
    if (i >= equations_.size())
        throw IndexOutOfRangeError("equation index " + std::to_string(i + 1) +
                                   " out of range");
    return equations_[i];
}

void DaeSystem::require_square() const {
    if (!square())
        throw NonSquareSystemError(
            "analysis requires a square system: " +
            std::to_string(equation_count()) + " equations vs " +
            std::to_string(column_count()) + " columns");
}

std::vector<Column> DaeSystem::columns() const {
    std::vector<Column> cols;
    cols.reserve(column_count());
    for (const std::string& v : variables_) cols.push_back({v, false});
    for (const std::string& a : aux_vars_) cols.push_back({a, true});
    return cols;
}

Column DaeSystem::column(std::size_t j) const {
    if (j < variables_.size()) return {variables_[j], false};
    j -= variables_.size();
    if (j < aux_vars_.size()) return {aux_vars_[j], true};
    throw IndexOutOfRangeError("column index out of range");
}

DaeSystem DaeSystem::with_equation(std::size_t i, Expr replacement) const {
    if (i >= equations_.size())
        throw IndexOutOfRangeError("row index out of range");
    std::vector<Expr> eqs = equations_;
    eqs[i] = std::move(replacement);
    return DaeSystem(std::move(eqs), variables_, params_, base_point_,
                     aux_vars_);
}

DaeSystem DaeSystem::with_rows_appended(std::vector<Expr> rows,
                                        std::vector<std::string> new_aux,
                                        std::optional<Point> new_base) const {
    std::vector<Expr> eqs = equations_;
    eqs.insert(eqs.end(), rows.begin(), rows.end());
    std::vector<std::string> aux = aux_vars_;
    aux.insert(aux.end(), new_aux.begin(), new_aux.end());
    return DaeSystem(std::move(eqs), variables_, params_, std::move(new_base),
                     std::move(aux));
}

DaeSystem DaeSystem::with_base_point(std::optional<Point> p) const {
    return DaeSystem(equations_, variables_, params_, std::move(p), aux_vars_);
}

ZeroTestConfig DaeSystem::analysis_config(ZeroTestConfig base) const {
    if (!base.center && base_point_) base.center = base_point_;
    for (const auto& [k, v] : params_)
        base.params.emplace(k, v);
    return base;
}

std::vector<Expr> subsystem(const DaeSystem& sys,
                            const std::vector<std::size_t>& rows) {
    std::vector<Expr> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) out.push_back(sys.equation(i));
    return out;
}

namespace {

Expr closed_form_for(const TrajectoryFixture& fix, const std::string& name) {
    auto it = fix.closed_forms.find(name);
    if (it == fix.closed_forms.end())
        throw MissingClosedFormError("trajectory fixture has no closed form "
                                     "for '" + name + "'");
    ExprSupport sup = collect_support(it->second);
    if (!sup.slots.empty())
        throw MissingClosedFormError("closed form for '" + name +
                                     "' must depend on t only");
    return it->second;
}

} // namespace

std::vector<std::vector<double>> residuals(const DaeSystem& sys,
                                           const TrajectoryFixture& fix) {
    // Needed (name, order) slots across all equations.
    std::set<VarSlot> needed;
    for (const Expr& eq : sys.equations())
        for (const VarSlot& s : collect_support(eq).slots) needed.insert(s);

    // Closed forms for each differential slot, by symbolic differentiation.
    std::map<VarSlot, Expr> slot_forms;
    std::map<std::string, const std::vector<double>*> aux_tables;
    for (const VarSlot& s : needed) {
        if (s.aux && !fix.closed_forms.count(s.name)) {
            auto nt = fix.aux_numeric.find(s.name);
            if (nt == fix.aux_numeric.end() ||
                nt->second.size() != fix.grid.size() || s.order != 0)
                throw MissingClosedFormError(
                    "no closed form or grid values for auxiliary '" + s.name +
                    "'");
            aux_tables[s.name] = &nt->second;
        } else {
            slot_forms[s] = total_derivative(closed_form_for(fix, s.name),
                                             s.order);
        }
    }

    std::vector<std::vector<double>> out(fix.grid.size());
    for (std::size_t g = 0; g < fix.grid.size(); ++g) {
        Point p;
        p.t = fix.grid[g];
        EvalEnv tenv;
        tenv.t = p.t;
        tenv.params = &sys.params();
        for (const auto& [slot, form] : slot_forms)
            p.values[slot] = eval(form, tenv);
        for (const auto& [name, table] : aux_tables)
            p.values[VarSlot::of_aux(name)] = (*table)[g];
        out[g].reserve(sys.equation_count());
        for (const Expr& eq : sys.equations())
            out[g].push_back(eval_at_point(eq, p, sys.params()));
    }
    return out;
}

double max_abs_residual(const DaeSystem& sys, const TrajectoryFixture& fix) {
    double m = 0;
    for (const auto& row : residuals(sys, fix))
        for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

} // namespace daerelax
