// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_AUGMENTATION_HPP
#define DAERELAX_AUGMENTATION_HPP

#include <daerelax/pivot.hpp>

#include <map>
#include <optional>
#include <string>

namespace daerelax {

/// One augmentation-method modification: the tight-order derivatives in the
/// pivot row and in copies of the reduced equations are renamed to fresh
/// algebraic variables (columns in J) or frozen to constants (columns in T),
/// and the copies are appended. No symbolic solving happens; sparsity is
/// retained.
struct AugmentationStep {
    PivotChoice pivot;
    std::map<VarSlot, double> xi;       // frozen constants for T-slots
    std::vector<std::string> new_aux;   // one per column of J
    DaeSystem new_system;               // size n + m
    std::vector<long> p_bar;            // extended feasible dual
    std::vector<long> q_bar;
    long delta_before = 0;
    std::optional<long> delta_after;
};

/// xi values may be given explicitly per column name; otherwise the system
/// base point supplies them, and failing that they default to 0 with one
/// automatic retry at 1 when the frozen pivot block turns singular.
AugmentationStep augment_step(const DaeSystem& sys, const DualSolution& dual,
                              const PivotChoice& pivot,
                              const std::map<std::string, double>& xi_explicit,
                              const ZeroTestConfig& cfg, int iteration = -1);

/// Extends a trajectory that solves the pre-step system with the uniquely
/// determined auxiliary trajectory: a closed form when the copied equations
/// are affine in the new variables, otherwise per-grid-point damped Newton
/// values (tolerance 1e-12).
TrajectoryFixture recover_aux_trajectory(const AugmentationStep& step,
                                         const TrajectoryFixture& fix,
                                         const ZeroTestConfig& cfg);

/// Shared recovery helper: solves `equations` for `aux_names` along the
/// fixture (affine solve, else damped Newton) and returns the extended
/// fixture.
TrajectoryFixture extend_fixture_with_aux(const DaeSystem& sys,
                                          const TrajectoryFixture& fix,
                                          const std::vector<Expr>& equations,
                                          const std::vector<std::string>& aux_names,
                                          const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
