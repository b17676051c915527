// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_CALCULUS_HPP
#define DAERELAX_CALCULUS_HPP

#include <daerelax/expr.hpp>
#include <daerelax/point.hpp>

#include <optional>
#include <set>

namespace daerelax {

/// d^times/dt^times, treating each variable slot as a function of t whose
/// derivative is the next-order slot. The result is simplified.
Expr total_derivative(const Expr& e, int times = 1);

/// Symbolic partial derivative treating the slot as an independent
/// coordinate. Negative orders give zero.
Expr partial(const Expr& e, const VarSlot& slot);
Expr partial(const Expr& e, const std::string& var, int order);

/// Simultaneous replacement; inserted expressions are not re-substituted.
Expr substitute(const Expr& e, const SubstMap& map);

/// Does the slot occur syntactically?
bool occurs(const Expr& e, const VarSlot& slot);

struct ExprSupport {
    std::set<VarSlot> slots;
    std::set<std::string> params;
    bool uses_time = false;
};
ExprSupport collect_support(const Expr& e);

/// Largest k such that the partial w.r.t. x_j^(k) (or the aux variable) is
/// not identically zero; nullopt encodes "never occurs" (-infinity).
/// Syntactic occurrence after simplification is refined by the probabilistic
/// zero test, so structurally present but vanishing dependencies drop out.
std::optional<int> sigma_order(const Expr& e, const std::string& var,
                               const ZeroTestConfig& cfg);
std::optional<int> sigma_order_aux(const Expr& e, const std::string& aux,
                                   const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
