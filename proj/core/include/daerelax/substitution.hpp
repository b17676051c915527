// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_SUBSTITUTION_HPP
#define DAERELAX_SUBSTITUTION_HPP

#include <daerelax/pivot.hpp>

#include <optional>

namespace daerelax {

/// One substitution-method (or LC-method) modification: row r of the system
/// is replaced by an equation that no longer depends on any tight-order
/// derivative, strictly lowering the structural degree estimate.
struct SubstitutionStep {
    PivotChoice pivot;
    std::vector<VarSlot> targets;          // x_J^(q - p_r)
    std::vector<Expr> reduced;             // F_I^(p - p_r 1)
    SubstMap explicit_map;                 // target -> solved expression
    Expr new_fr;
    DaeSystem new_system;
    long delta_before = 0;
    std::optional<long> delta_after;
    /// Combination coefficients u_I when produced by the LC route.
    std::optional<std::vector<Expr>> lc_coefficients;
};

/// F_i differentiated p_i - p_r times, for i in I in index order.
std::vector<Expr> reduced_system(const DaeSystem& sys, const DualSolution& dual,
                                 const PivotChoice& pivot);

/// Solves the reduced equations for the targets, requiring the system to be
/// affine in them; fraction-free style elimination over the expression
/// field. Throws NonlinearTargetsError / SingularAtConstructionError.
SubstMap solve_targets(const std::vector<Expr>& reduced,
                       const std::vector<VarSlot>& targets,
                       const ZeroTestConfig& cfg);

std::vector<VarSlot> target_slots(const DaeSystem& sys,
                                  const DualSolution& dual,
                                  const PivotChoice& pivot);

/// The substitution method proper: solve, substitute into F_r, verify the
/// vanishing-derivative and strict-decrease guarantees.
SubstitutionStep substitute_step(const DaeSystem& sys, const DualSolution& dual,
                                 const PivotChoice& pivot,
                                 const ZeroTestConfig& cfg);

/// The LC route: replace F_r by u_r F_r + sum u_i F_i^(p_i - p_r) with the
/// cokernel coefficients u_I = -D[r,J] (D[I,J])^-1. Requires the validity
/// condition ord(u_i, x_j) < q_j - p_r; throws LCConditionError otherwise.
SubstitutionStep lc_step(const DaeSystem& sys, const DualSolution& dual,
                         const PivotChoice& pivot, const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
