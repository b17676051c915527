// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/linear_solve.hpp>

#include <daerelax/errors.hpp>

#include <algorithm>

namespace daerelax {

bool entry_is_zero(const Expr& e, const ZeroTestConfig& cfg) {
    if (e.is_zero()) return true;
    if (e.is_num()) return false;
    return is_identically_zero(e, cfg);
}

namespace {

struct Elimination {
    ExprMatrix m;
    std::vector<bool> row_done;
    std::vector<bool> col_done;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;

    explicit Elimination(ExprMatrix mat)
        : m(std::move(mat)), row_done(m.size(), false),
          col_done(m.empty() ? 0 : m[0].size(), false) {}

    std::size_t rows() const { return m.size(); }
    std::size_t cols() const { return m.empty() ? 0 : m[0].size(); }

    /// Fewest-node not-identically-zero entry among unused rows/cols.
    std::optional<std::pair<std::size_t, std::size_t>>
    find_pivot_entry(const ZeroTestConfig& cfg) {
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < rows(); ++i) {
            if (row_done[i]) continue;
            for (std::size_t j = 0; j < cols(); ++j) {
                if (col_done[j]) continue;
                if (!m[i][j].is_zero()) candidates.emplace_back(i, j);
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](const auto& a, const auto& b) {
                             return m[a.first][a.second].tree_size() <
                                    m[b.first][b.second].tree_size();
                         });
        for (const auto& [i, j] : candidates)
            if (!entry_is_zero(m[i][j], cfg)) return std::make_pair(i, j);
        return std::nullopt;
    }

    /// Clears the pivot column from other rows. With `normalize` the pivot
    /// row is scaled to 1 and *all* other rows are reduced (Gauss-Jordan,
    /// used for solving); without it only not-yet-pivoted rows are touched
    /// (enough for rank).
    void eliminate(std::size_t pi, std::size_t pj, bool normalize) {
        Expr pivot = m[pi][pj];
        if (normalize) {
            for (std::size_t j = 0; j < cols(); ++j) {
                if (j == pj) {
                    m[pi][j] = Expr::num(1);
                } else if (!m[pi][j].is_zero()) {
                    m[pi][j] = simplify(Expr::div(m[pi][j], pivot));
                }
            }
        }
        for (std::size_t i = 0; i < rows(); ++i) {
            if (i == pi) continue;
            if (!normalize && row_done[i]) continue;
            if (m[i][pj].is_zero()) continue;
            Expr factor = normalize ? m[i][pj]
                                    : simplify(Expr::div(m[i][pj], pivot));
            for (std::size_t j = 0; j < cols(); ++j) {
                if (j == pj) {
                    m[i][j] = Expr::num(0);
                } else if (!m[pi][j].is_zero()) {
                    m[i][j] = simplify(m[i][j] - factor * m[pi][j]);
                }
            }
        }
        row_done[pi] = true;
        col_done[pj] = true;
        pivots.emplace_back(pi, pj);
    }
};

} // namespace

int symbolic_rank(ExprMatrix mat, const ZeroTestConfig& cfg) {
    for (auto& row : mat)
        for (auto& e : row) e = simplify(e);
    Elimination elim(std::move(mat));
    while (true) {
        auto p = elim.find_pivot_entry(cfg);
        if (!p) break;
        elim.eliminate(p->first, p->second, /*normalize=*/false);
    }
    return static_cast<int>(elim.pivots.size());
}

std::vector<Expr> solve_linear(ExprMatrix a, std::vector<Expr> b,
                               const ZeroTestConfig& cfg) {
    const std::size_t n = a.size();
    if (b.size() != n) throw Error("solve_linear: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw Error("solve_linear: matrix not square");
        a[i].push_back(b[i]); // augmented column
        for (auto& e : a[i]) e = simplify(e);
    }
    Elimination elim(std::move(a));
    elim.col_done.back() = true; // never pivot on the augmented column
    for (std::size_t step = 0; step < n; ++step) {
        auto p = elim.find_pivot_entry(cfg);
        if (!p)
            throw SingularAtConstructionError(
                "coefficient matrix failed the nonsingularity zero test");
        elim.eliminate(p->first, p->second, /*normalize=*/true);
    }
    std::vector<Expr> x(n, Expr::num(0));
    for (const auto& [pi, pj] : elim.pivots) x[pj] = elim.m[pi][n];
    return x;
}

ExprMatrix symbolic_inverse(const ExprMatrix& a, const ZeroTestConfig& cfg) {
    const std::size_t n = a.size();
    ExprMatrix aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw Error("symbolic_inverse: not square");
        aug[i] = a[i];
        for (auto& e : aug[i]) e = simplify(e);
        for (std::size_t j = 0; j < n; ++j)
            aug[i].push_back(Expr::num(i == j ? 1 : 0));
    }
    Elimination elim(std::move(aug));
    for (std::size_t j = n; j < 2 * n; ++j) elim.col_done[j] = true;
    for (std::size_t step = 0; step < n; ++step) {
        auto p = elim.find_pivot_entry(cfg);
        if (!p)
            throw SingularAtConstructionError(
                "matrix failed the nonsingularity zero test while inverting");
        elim.eliminate(p->first, p->second, /*normalize=*/true);
    }
    ExprMatrix inv(n, std::vector<Expr>(n, Expr::num(0)));
    for (const auto& [pi, pj] : elim.pivots)
        for (std::size_t j = 0; j < n; ++j) inv[pj][j] = elim.m[pi][n + j];
    return inv;
}

std::optional<std::vector<std::size_t>>
independent_columns(const ExprMatrix& rows,
                    const std::vector<std::size_t>& candidates,
                    const ZeroTestConfig& cfg) {
    const std::size_t m = rows.size();
    if (m == 0) return std::vector<std::size_t>{};
    ExprMatrix work = rows;
    for (auto& row : work)
        for (auto& e : row) e = simplify(e);
    std::vector<bool> row_used(m, false);
    std::vector<std::size_t> chosen;
    for (std::size_t c : candidates) {
        if (chosen.size() == m) break;
        // pick the fewest-node nonzero entry of column c among unused rows
        std::vector<std::size_t> order;
        for (std::size_t r = 0; r < m; ++r)
            if (!row_used[r] && !work[r][c].is_zero()) order.push_back(r);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return work[a][c].tree_size() <
                                    work[b][c].tree_size();
                         });
        std::optional<std::size_t> pick;
        for (std::size_t r : order) {
            if (!entry_is_zero(work[r][c], cfg)) {
                pick = r;
                break;
            }
        }
        if (!pick) continue;
        std::size_t pr = *pick;
        Expr pivot = work[pr][c];
        for (std::size_t r = 0; r < m; ++r) {
            if (r == pr || row_used[r] || work[r][c].is_zero()) continue;
            Expr factor = simplify(Expr::div(work[r][c], pivot));
            for (std::size_t j = 0; j < work[r].size(); ++j) {
                work[r][j] = j == c ? Expr::num(0)
                                    : simplify(work[r][j] - factor * work[pr][j]);
            }
        }
        row_used[pr] = true;
        chosen.push_back(c);
    }
    if (chosen.size() != m) return std::nullopt;
    return chosen;
}

} // namespace daerelax
