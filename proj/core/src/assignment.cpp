// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/assignment.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <algorithm>
#include <limits>

namespace daerelax {

int SignatureMatrix::max_entry() const {
    int m = 0;
    for (const auto& e : data)
        if (e) m = std::max(m, *e);
    return m;
}

SignatureMatrix signature(const DaeSystem& sys, const ZeroTestConfig& cfg_in) {
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    std::vector<Column> cols = sys.columns();
    SignatureMatrix sig(sys.equation_count(), cols.size());
    for (std::size_t i = 0; i < sys.equation_count(); ++i) {
        const Expr& f = sys.equation(i);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            sig.at(i, j) = cols[j].aux
                               ? sigma_order_aux(f, cols[j].name, cfg)
                               : sigma_order(f, cols[j].name, cfg);
        }
    }
    return sig;
}

bool DualSolution::feasible_for(const SignatureMatrix& sig) const {
    if (p.size() != sig.rows || q.size() != sig.cols) return false;
    for (std::size_t i = 0; i < sig.rows; ++i)
        for (std::size_t j = 0; j < sig.cols; ++j)
            if (sig.finite(i, j) && q[j] - p[i] < *sig.at(i, j)) return false;
    return true;
}

namespace {

constexpr long kInf = std::numeric_limits<long>::max() / 4;

/// Kuhn's augmenting-path matching on an adjacency list; match_col[j] is the
/// row matched to column j or -1.
bool try_augment(std::size_t i, const std::vector<std::vector<std::size_t>>& adj,
                 std::vector<int>& match_col, std::vector<bool>& visited) {
    for (std::size_t j : adj[i]) {
        if (visited[j]) continue;
        visited[j] = true;
        if (match_col[j] < 0 ||
            try_augment(static_cast<std::size_t>(match_col[j]), adj, match_col,
                        visited)) {
            match_col[j] = static_cast<int>(i);
            return true;
        }
    }
    return false;
}

std::optional<std::vector<std::size_t>>
perfect_matching(const std::vector<std::vector<std::size_t>>& adj,
                 std::size_t n_cols) {
    std::vector<int> match_col(n_cols, -1);
    for (std::size_t i = 0; i < adj.size(); ++i) {
        std::vector<bool> visited(n_cols, false);
        if (!try_augment(i, adj, match_col, visited)) return std::nullopt;
    }
    std::vector<std::size_t> match_row(adj.size());
    for (std::size_t j = 0; j < n_cols; ++j)
        if (match_col[j] >= 0)
            match_row[static_cast<std::size_t>(match_col[j])] = j;
    return match_row;
}

/// O(n^3) Hungarian method for the max-weight perfect assignment, run on
/// negated weights; forbidden edges carry an infinite cost.
std::vector<std::size_t> hungarian(const SignatureMatrix& sig) {
    const std::size_t n = sig.rows;
    std::vector<std::vector<long>> cost(n + 1, std::vector<long>(n + 1, kInf));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sig.finite(i, j)) cost[i + 1][j + 1] = -*sig.at(i, j);

    std::vector<long> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<long> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = 0;
            long delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<std::size_t> match_row(n);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] != 0) match_row[p[j] - 1] = j - 1;
    return match_row;
}

} // namespace

DualSolution solve_assignment(const SignatureMatrix& sig) {
    DualSolution out;
    out.p.assign(sig.rows, 0);
    out.q.assign(sig.cols, 0);
    if (sig.rows != sig.cols)
        throw NonSquareSystemError("assignment requires a square signature");
    const std::size_t n = sig.rows;
    if (n == 0) {
        out.delta_hat = 0;
        out.optimal = true;
        out.matching = std::vector<std::size_t>{};
        return out;
    }

    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sig.finite(i, j)) adj[i].push_back(j);

    if (!perfect_matching(adj, n)) {
        // structural failure: no perfect matching, delta_hat = -infinity
        out.delta_hat = std::nullopt;
        out.optimal = false;
        return out;
    }

    std::vector<std::size_t> match = hungarian(sig);
    long weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!sig.finite(i, match[i]))
            throw PostconditionViolationError(
                "assignment produced a matching on a forbidden edge");
        weight += *sig.at(i, match[i]);
    }

    // Componentwise-minimal normalized optimal dual: least fixpoint of
    //   p_i >= 0,  q_j >= p_i + c_ij (all edges),  p_i >= q_j - c_ij (matched).
    std::vector<long> p(n, 0), q(n, std::numeric_limits<long>::min());
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
        if (++rounds > 4 * n + 8)
            throw PostconditionViolationError(
                "minimal dual iteration failed to converge");
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j : adj[i]) {
                long need = p[i] + *sig.at(i, j);
                if (q[j] < need) {
                    q[j] = need;
                    changed = true;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            long need = q[match[i]] - *sig.at(i, match[i]);
            if (p[i] < need) {
                p[i] = need;
                changed = true;
            }
        }
    }

    long value = 0;
    for (std::size_t j = 0; j < n; ++j) value += q[j];
    for (std::size_t i = 0; i < n; ++i) value -= p[i];
    if (value != weight)
        throw PostconditionViolationError(
            "strong duality check failed: dual value " + std::to_string(value) +
            " vs matching weight " + std::to_string(weight));
    long bound = static_cast<long>(n) * sig.max_entry();
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] < 0 || p[i] > bound || q[i] < 0 || q[i] > bound)
            throw PostconditionViolationError(
                "minimal dual exceeded the n*l offset bound");

    // Lexicographically smallest matched column per row, over the subgraph of
    // tight edges (all perfect matchings there are maximum-weight ones).
    if (n <= 64) {
        std::vector<std::vector<std::size_t>> tight(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j : adj[i])
                if (q[j] - p[i] == *sig.at(i, j)) tight[i].push_back(j);
        std::vector<std::size_t> pinned(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<bool> taken(n, false);
            for (std::size_t k = 0; k < i; ++k) taken[pinned[k]] = true;
            bool found = false;
            for (std::size_t j : tight[i]) {
                if (taken[j]) continue;
                // pin rows 0..i-1 plus (i, j), test that a perfect matching
                // on tight edges still exists
                std::vector<std::vector<std::size_t>> restricted(n);
                for (std::size_t k = 0; k < i; ++k) restricted[k] = {pinned[k]};
                restricted[i] = {j};
                for (std::size_t k = i + 1; k < n; ++k) restricted[k] = tight[k];
                if (perfect_matching(restricted, n)) {
                    pinned[i] = j;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw PostconditionViolationError(
                    "tie-break lost perfect matching feasibility");
        }
        match = pinned;
    }

    out.p = std::move(p);
    out.q = std::move(q);
    out.matching = std::move(match);
    out.delta_hat = weight;
    out.optimal = true;
    return out;
}

std::optional<long> delta_hat(const DaeSystem& sys, const ZeroTestConfig& cfg) {
    sys.require_square();
    return solve_assignment(signature(sys, cfg)).delta_hat;
}

} // namespace daerelax
