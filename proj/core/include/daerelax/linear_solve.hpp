// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_LINEAR_SOLVE_HPP
#define DAERELAX_LINEAR_SOLVE_HPP

#include <daerelax/expr.hpp>
#include <daerelax/point.hpp>

#include <optional>
#include <vector>

namespace daerelax {

using ExprMatrix = std::vector<std::vector<Expr>>;

/// Entry-level zero decision: structural fast path, then the sampling test.
bool entry_is_zero(const Expr& e, const ZeroTestConfig& cfg);

/// Rank over the field of expressions; Gaussian elimination with
/// probabilistic pivot zero tests. Pivots are chosen among the nonzero
/// candidates with the fewest nodes, which curbs expression swell.
int symbolic_rank(ExprMatrix m, const ZeroTestConfig& cfg);

/// Solves A x = b over the expression field by elimination with pivot
/// zero tests; throws SingularAtConstructionError if A fails the
/// nonsingularity test.
std::vector<Expr> solve_linear(ExprMatrix a, std::vector<Expr> b,
                               const ZeroTestConfig& cfg);

/// Inverse of a square expression matrix (elimination against the identity).
ExprMatrix symbolic_inverse(const ExprMatrix& a, const ZeroTestConfig& cfg);

/// Greedily selects |rows| candidate columns forming a nonsingular square
/// submatrix of `rows`, scanning candidates in the given order; the
/// elimination itself certifies independence. nullopt if the row set has
/// deficient rank over the candidates.
std::optional<std::vector<std::size_t>>
independent_columns(const ExprMatrix& rows,
                    const std::vector<std::size_t>& candidates,
                    const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
