// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_PIVOT_HPP
#define DAERELAX_PIVOT_HPP

#include <daerelax/system_jacobian.hpp>

#include <cstddef>
#include <vector>

namespace daerelax {

/// A modification-step selection: pivot row r, row set I, column set J with
/// D[I, J] nonsingular, rank D[I+{r}, :] = |I|, and p_r minimal over I+{r}.
struct PivotChoice {
    std::size_t r = 0;
    std::vector<std::size_t> rows_I;
    std::vector<std::size_t> cols_J;
    long kappa = 0;                    // max_{i in I} p_i - p_r
    std::vector<std::size_t> cols_T;   // complement of J
    std::vector<std::size_t> rows_S;   // complement of I + {r}
    /// True when every non-differentiated reduced equation is affine in the
    /// elimination targets, so a symbolic solve can succeed.
    bool targets_affine = true;
};

/// Rank verdict and pivot selection from one tracked column elimination, so
/// the singularity decision and the selection it feeds can never disagree.
struct RankAnalysis {
    int rank = 0;
    std::optional<PivotChoice> pivot; // present iff rank deficient
};

RankAnalysis rank_and_pivot(const DaeSystem& sys, const SystemJacobian& jac,
                            const ZeroTestConfig& cfg);

/// Finds (r, I, J) on an identically singular system Jacobian via tracked
/// column elimination. Among the admissible pivot rows (minimal p, ties by
/// index) the first whose reduced system is affine in its targets is
/// preferred; if none qualifies the lowest-index choice is returned with
/// targets_affine = false. Deterministic for a fixed seed.
PivotChoice find_pivot(const DaeSystem& sys, const SystemJacobian& jac,
                       const ZeroTestConfig& cfg);

/// Dynamic pivoting: same (r, I), but J re-chosen to maximize |det D[I, J]|
/// at the given point. Falls back to find_pivot's choice when the numeric
/// evaluation fails or every candidate block is singular at the point.
PivotChoice repivot_at_point(const DaeSystem& sys, const SystemJacobian& jac,
                             const Point& point, const ZeroTestConfig& cfg);

/// Independent verification of the selection conditions; used to validate
/// manual overrides and in tests.
bool pivot_satisfies_conditions(const SystemJacobian& jac,
                                const PivotChoice& pivot,
                                const ZeroTestConfig& cfg);

/// Fills T, S and kappa from r, I, J; validates index ranges.
PivotChoice complete_pivot(const DaeSystem& sys, const DualSolution& dual,
                           std::size_t r, std::vector<std::size_t> rows_I,
                           std::vector<std::size_t> cols_J);

} // namespace daerelax

#endif
