// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_SYSTEM_JACOBIAN_HPP
#define DAERELAX_SYSTEM_JACOBIAN_HPP

#include <daerelax/assignment.hpp>
#include <daerelax/dae_system.hpp>
#include <daerelax/linear_solve.hpp>

#include <string>
#include <vector>

namespace daerelax {

/// Why structural preprocessing is (or is not) applicable to a system.
enum class FailureClass {
    Ok,
    NoPerfectMatching,       // the signature bipartite graph has none
    PointSingularCandidate,  // full structural rank, singular at base point
    IdenticallySingular,     // Jacobian singular as a function
};

const char* failure_name(FailureClass f);

/// D_{i,j} = dF_i/dx_j^(q_j - p_i), zero when the order is negative; the
/// pattern marks entries that fail the identically-zero test.
struct SystemJacobian {
    std::vector<Column> columns;
    ExprMatrix entries;
    std::vector<std::vector<bool>> pattern;
    DualSolution dual;

    std::size_t rows() const { return entries.size(); }
    std::size_t cols() const { return columns.size(); }
    const Expr& at(std::size_t i, std::size_t j) const {
        return entries[i][j];
    }
};

SystemJacobian system_jacobian(const DaeSystem& sys, const DualSolution& dual,
                               const ZeroTestConfig& cfg);

/// Maximum matching size on the zero/nonzero pattern.
int term_rank(const SystemJacobian& jac);

/// Rank over the expression field (probabilistic).
int structural_rank(const SystemJacobian& jac, const ZeroTestConfig& cfg);

FailureClass classify_failure(const DaeSystem& sys, const DualSolution& dual,
                              const SystemJacobian& jac,
                              const ZeroTestConfig& cfg);

/// Numeric instantiation at a point (missing slots read as the box center 0).
std::vector<std::vector<double>>
eval_matrix(const ExprMatrix& m, const Point& p,
            const std::map<std::string, double>& params);

double numeric_determinant(const std::vector<std::vector<double>>& m);

/// Point-singularity verdict that tolerates benign row/column scaling: the
/// matrix is Ruiz-equilibrated, then judged by its extreme singular values.
bool numerically_singular(const std::vector<std::vector<double>>& m,
                          double tol = 1e-9);

} // namespace daerelax

#endif
