// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_ASSIGNMENT_HPP
#define DAERELAX_ASSIGNMENT_HPP

#include <daerelax/dae_system.hpp>

#include <optional>
#include <vector>

namespace daerelax {

/// Matrix of highest derivative orders sigma(F_i, x_j); nullopt encodes
/// -infinity (no dependence).
struct SignatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::optional<int>> data;

    SignatureMatrix() = default;
    SignatureMatrix(std::size_t r, std::size_t c)
        : rows(r), cols(c), data(r * c) {}

    std::optional<int>& at(std::size_t i, std::size_t j) {
        return data[i * cols + j];
    }
    const std::optional<int>& at(std::size_t i, std::size_t j) const {
        return data[i * cols + j];
    }
    bool finite(std::size_t i, std::size_t j) const {
        return at(i, j).has_value();
    }
    int max_entry() const;
};

SignatureMatrix signature(const DaeSystem& sys, const ZeroTestConfig& cfg);

/// Dual offsets of the maximum-weight perfect-matching problem on the
/// signature bipartite graph. When a perfect matching exists the returned
/// dual is optimal, normalized to min p = 0, and componentwise minimal among
/// all normalized optimal duals. Matched edges are tight.
struct DualSolution {
    std::vector<long> p;
    std::vector<long> q;
    std::optional<std::vector<std::size_t>> matching; // row -> column
    std::optional<long> delta_hat;                    // nullopt = -infinity
    bool optimal = false;

    bool feasible_for(const SignatureMatrix& sig) const;
};

DualSolution solve_assignment(const SignatureMatrix& sig);

/// signature + solve_assignment; nullopt when no perfect matching exists.
std::optional<long> delta_hat(const DaeSystem& sys, const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
