// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/pivot.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace daerelax {

namespace {

std::vector<std::size_t> complement(std::size_t n,
                                    const std::set<std::size_t>& taken) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!taken.count(i)) out.push_back(i);
    return out;
}

struct ColumnElimination {
    ExprMatrix work;                       // current (column-operated) matrix
    std::vector<bool> in_H;                // pivoted rows
    std::vector<bool> in_B;                // pivot columns
    std::vector<std::size_t> row_of_col;   // the bijection h on B
};

ColumnElimination eliminate_columns(const ExprMatrix& entries,
                                    const ZeroTestConfig& cfg) {
    ColumnElimination st;
    st.work = entries;
    for (auto& row : st.work)
        for (auto& e : row) e = simplify(e);
    const std::size_t nr = st.work.size();
    const std::size_t nc = nr ? st.work[0].size() : 0;
    st.in_H.assign(nr, false);
    st.in_B.assign(nc, false);
    st.row_of_col.assign(nc, 0);
    for (std::size_t i = 0; i < nr; ++i) {
        // candidate pivot columns, fewest-node entry first
        std::vector<std::size_t> cand;
        for (std::size_t j = 0; j < nc; ++j)
            if (!st.in_B[j] && !st.work[i][j].is_zero()) cand.push_back(j);
        std::stable_sort(cand.begin(), cand.end(),
                         [&](std::size_t a, std::size_t b) {
                             return st.work[i][a].tree_size() <
                                    st.work[i][b].tree_size();
                         });
        std::size_t pj = nc;
        for (std::size_t j : cand) {
            if (!entry_is_zero(st.work[i][j], cfg)) {
                pj = j;
                break;
            }
        }
        if (pj == nc) continue; // row dependent on the pivoted ones
        Expr pivot = st.work[i][pj];
        for (std::size_t r = 0; r < nr; ++r)
            st.work[r][pj] = r == i
                                 ? Expr::num(1)
                                 : simplify(Expr::div(st.work[r][pj], pivot));
        for (std::size_t j = 0; j < nc; ++j) {
            if (j == pj || st.work[i][j].is_zero()) continue;
            Expr f = st.work[i][j];
            for (std::size_t r = 0; r < nr; ++r) {
                st.work[r][j] =
                    r == i ? Expr::num(0)
                           : simplify(st.work[r][j] - f * st.work[r][pj]);
            }
        }
        st.in_H[i] = true;
        st.in_B[pj] = true;
        st.row_of_col[pj] = i;
    }
    return st;
}

/// Is every reduced equation affine in the targets x_J^(q-p_r)? Rows
/// differentiated at least once are affine in their top-order slots by the
/// structure of the derivative, so only p_i == p_r rows need the check.
bool reduced_system_affine(const DaeSystem& sys, const DualSolution& dual,
                           std::size_t r, const std::vector<std::size_t>& I,
                           const std::vector<std::size_t>& J,
                           const ZeroTestConfig& cfg) {
    long pr = dual.p[r];
    std::vector<VarSlot> targets;
    for (std::size_t j : J) {
        long k = dual.q[j] - pr;
        Column col = sys.column(j);
        targets.push_back(col.slot(static_cast<int>(k)));
    }
    for (std::size_t i : I) {
        if (dual.p[i] != pr) continue;
        const Expr& f = sys.equation(i);
        for (std::size_t a = 0; a < targets.size(); ++a) {
            Expr da = partial(f, targets[a]);
            if (da.is_zero()) continue;
            for (std::size_t b = a; b < targets.size(); ++b) {
                if (!entry_is_zero(partial(da, targets[b]), cfg)) return false;
            }
        }
    }
    return true;
}

} // namespace

PivotChoice complete_pivot(const DaeSystem& sys, const DualSolution& dual,
                           std::size_t r, std::vector<std::size_t> rows_I,
                           std::vector<std::size_t> cols_J) {
    const std::size_t nr = sys.equation_count();
    const std::size_t nc = sys.column_count();
    std::sort(rows_I.begin(), rows_I.end());
    std::sort(cols_J.begin(), cols_J.end());
    if (r >= nr) throw IndexOutOfRangeError("pivot row out of range");
    for (std::size_t i : rows_I)
        if (i >= nr || i == r)
            throw InvalidSelectionError("row set must exclude r and stay in range");
    for (std::size_t j : cols_J)
        if (j >= nc) throw IndexOutOfRangeError("pivot column out of range");
    if (rows_I.size() != cols_J.size())
        throw InvalidSelectionError("row and column sets must have equal size");
    PivotChoice pc;
    pc.r = r;
    pc.rows_I = std::move(rows_I);
    pc.cols_J = std::move(cols_J);
    long pr = dual.p[r];
    long kappa = 0;
    for (std::size_t i : pc.rows_I) kappa = std::max(kappa, dual.p[i] - pr);
    pc.kappa = kappa;
    std::set<std::size_t> jt(pc.cols_J.begin(), pc.cols_J.end());
    pc.cols_T = complement(nc, jt);
    std::set<std::size_t> it(pc.rows_I.begin(), pc.rows_I.end());
    it.insert(r);
    pc.rows_S = complement(nr, it);
    return pc;
}

RankAnalysis rank_and_pivot(const DaeSystem& sys, const SystemJacobian& jac,
                            const ZeroTestConfig& cfg_in) {
    ZeroTestConfig base_cfg = sys.analysis_config(cfg_in);
    const DualSolution& dual = jac.dual;
    const std::size_t n = jac.rows();
    std::string last_issue = "no admissible selection";
    for (int attempt = 0; attempt < 3; ++attempt) {
        ZeroTestConfig cfg =
            base_cfg.with_seed(base_cfg.seed + 0x9e3779b9u * attempt);
        ColumnElimination st = eliminate_columns(jac.entries, cfg);
        int rank = 0;
        std::size_t ell = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (st.in_H[i])
                ++rank;
            else if (ell == n)
                ell = i;
        }
        if (ell == n) return RankAnalysis{rank, std::nullopt};
        std::set<std::size_t> Z{ell};
        for (std::size_t j = 0; j < st.in_B.size(); ++j)
            if (st.in_B[j] && !entry_is_zero(st.work[ell][j], cfg))
                Z.insert(st.row_of_col[j]);
        long pmin = dual.p[ell];
        for (std::size_t i : Z) pmin = std::min(pmin, dual.p[i]);
        std::vector<std::size_t> candidates;
        for (std::size_t i : Z)
            if (dual.p[i] == pmin) candidates.push_back(i);
        std::sort(candidates.begin(), candidates.end());

        std::optional<PivotChoice> fallback;
        for (std::size_t r : candidates) {
            std::vector<std::size_t> I;
            for (std::size_t i : Z)
                if (i != r) I.push_back(i);
            // column candidates: elimination-matched columns of I first
            std::vector<std::size_t> order;
            for (std::size_t j = 0; j < st.in_B.size(); ++j)
                if (st.in_B[j] &&
                    std::find(I.begin(), I.end(), st.row_of_col[j]) != I.end())
                    order.push_back(j);
            for (std::size_t j = 0; j < jac.cols(); ++j)
                if (std::find(order.begin(), order.end(), j) == order.end())
                    order.push_back(j);
            ExprMatrix rows;
            for (std::size_t i : I) rows.push_back(jac.entries[i]);
            auto J = independent_columns(rows, order, cfg);
            if (!J) {
                last_issue = "no nonsingular pivot block for a candidate row";
                continue;
            }
            std::sort(J->begin(), J->end());
            PivotChoice pc = complete_pivot(sys, dual, r, I, *J);
            pc.targets_affine =
                reduced_system_affine(sys, dual, r, pc.rows_I, pc.cols_J, cfg);
            if (pc.targets_affine) return RankAnalysis{rank, pc};
            if (!fallback) fallback = pc;
        }
        if (fallback) return RankAnalysis{rank, fallback};
    }
    throw DegenerateEliminationError(
        "pivot search failed across reseeded retries: " + last_issue);
}

PivotChoice find_pivot(const DaeSystem& sys, const SystemJacobian& jac,
                       const ZeroTestConfig& cfg) {
    RankAnalysis an = rank_and_pivot(sys, jac, cfg);
    if (!an.pivot)
        throw DegenerateEliminationError(
            "pivot search requires a rank-deficient system Jacobian");
    return *an.pivot;
}

PivotChoice repivot_at_point(const DaeSystem& sys, const SystemJacobian& jac,
                             const Point& point, const ZeroTestConfig& cfg) {
    PivotChoice pc = find_pivot(sys, jac, cfg);
    const std::size_t m = pc.rows_I.size();
    if (m == 0) return pc;
    std::vector<std::vector<double>> rows;
    try {
        ExprMatrix sub;
        for (std::size_t i : pc.rows_I) sub.push_back(jac.entries[i]);
        rows = eval_matrix(sub, point, sys.params());
    } catch (const EvalDomainError&) {
        return pc;
    }
    const std::size_t nc = jac.cols();

    // Enumerate column subsets when cheap, otherwise greedy volume pivoting.
    double best = 0.0;
    std::vector<std::size_t> best_J = pc.cols_J;
    auto det_of = [&](const std::vector<std::size_t>& J) {
        Eigen::MatrixXd a(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) a(i, j) = rows[i][J[j]];
        return std::abs(a.determinant());
    };
    double combos = 1;
    for (std::size_t i = 0; i < m; ++i)
        combos *= static_cast<double>(nc - i) / static_cast<double>(i + 1);
    if (combos <= 20000) {
        std::vector<std::size_t> J(m);
        std::iota(J.begin(), J.end(), 0);
        while (true) {
            double d = det_of(J);
            if (d > best) {
                best = d;
                best_J = J;
            }
            // next combination in lexicographic order
            long i = static_cast<long>(m) - 1;
            while (i >= 0 && J[i] == nc - m + i) --i;
            if (i < 0) break;
            ++J[i];
            for (std::size_t k = i + 1; k < m; ++k) J[k] = J[k - 1] + 1;
        }
    } else {
        // column-pivoted LU on the numeric rows
        Eigen::MatrixXd a(m, nc);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < nc; ++j) a(i, j) = rows[i][j];
        Eigen::MatrixXd work = a;
        std::vector<std::size_t> J;
        std::vector<bool> used_row(m, false);
        for (std::size_t step = 0; step < m; ++step) {
            double mag = -1;
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (used_row[i]) continue;
                for (std::size_t j = 0; j < nc; ++j) {
                    if (std::find(J.begin(), J.end(), j) != J.end()) continue;
                    if (std::abs(work(i, j)) > mag) {
                        mag = std::abs(work(i, j));
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (mag <= 0) break;
            J.push_back(bj);
            used_row[bi] = true;
            for (std::size_t i = 0; i < m; ++i) {
                if (used_row[i]) continue;
                double f = work(i, bj) / work(bi, bj);
                for (std::size_t j = 0; j < nc; ++j)
                    work(i, j) -= f * work(bi, j);
            }
        }
        if (J.size() == m) {
            std::sort(J.begin(), J.end());
            best = det_of(J);
            best_J = J;
        }
    }
    if (best <= 0.0) return pc; // every candidate block singular at the point
    PivotChoice out = complete_pivot(sys, jac.dual, pc.r, pc.rows_I, best_J);
    out.targets_affine = pc.targets_affine;
    return out;
}

bool pivot_satisfies_conditions(const SystemJacobian& jac,
                                const PivotChoice& pivot,
                                const ZeroTestConfig& cfg) {
    const std::size_t m = pivot.rows_I.size();
    if (pivot.cols_J.size() != m) return false;
    // (C3) minimal p on the pivot row
    for (std::size_t i : pivot.rows_I)
        if (jac.dual.p[pivot.r] > jac.dual.p[i]) return false;
    // (C1) D[I, J] nonsingular over the expression field
    ExprMatrix block;
    for (std::size_t i : pivot.rows_I) {
        block.emplace_back();
        for (std::size_t j : pivot.cols_J)
            block.back().push_back(jac.entries[i][j]);
    }
    if (symbolic_rank(block, cfg) != static_cast<int>(m)) return false;
    // (C2) rank of D[I + {r}, :] equals m
    ExprMatrix wide;
    for (std::size_t i : pivot.rows_I) wide.push_back(jac.entries[i]);
    wide.push_back(jac.entries[pivot.r]);
    return symbolic_rank(wide, cfg) == static_cast<int>(m);
}

} // namespace daerelax
