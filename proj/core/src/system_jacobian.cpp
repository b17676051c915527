// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/system_jacobian.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace daerelax {

const char* failure_name(FailureClass f) {
    switch (f) {
    case FailureClass::Ok: return "ok";
    case FailureClass::NoPerfectMatching: return "no-perfect-matching";
    case FailureClass::PointSingularCandidate:
        return "point-singular-candidate";
    case FailureClass::IdenticallySingular: return "identically-singular";
    }
    return "?";
}

SystemJacobian system_jacobian(const DaeSystem& sys, const DualSolution& dual,
                               const ZeroTestConfig& cfg_in) {
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    SystemJacobian jac;
    jac.columns = sys.columns();
    jac.dual = dual;
    const std::size_t nr = sys.equation_count();
    const std::size_t nc = jac.columns.size();
    if (dual.p.size() != nr || dual.q.size() != nc)
        throw Error("system_jacobian: dual dimensions do not match system");
    jac.entries.assign(nr, std::vector<Expr>(nc, Expr::num(0)));
    jac.pattern.assign(nr, std::vector<bool>(nc, false));
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            long k = dual.q[j] - dual.p[i];
            Expr entry = Expr::num(0);
            if (k >= 0)
                entry = partial(sys.equation(i),
                                jac.columns[j].slot(static_cast<int>(k)));
            jac.entries[i][j] = entry;
            jac.pattern[i][j] = !entry_is_zero(entry, cfg);
        }
    }
    return jac;
}

namespace {

bool augment_pattern(std::size_t i, const std::vector<std::vector<bool>>& pat,
                     std::vector<int>& match_col, std::vector<bool>& visited) {
    for (std::size_t j = 0; j < pat[i].size(); ++j) {
        if (!pat[i][j] || visited[j]) continue;
        visited[j] = true;
        if (match_col[j] < 0 ||
            augment_pattern(static_cast<std::size_t>(match_col[j]), pat,
                            match_col, visited)) {
            match_col[j] = static_cast<int>(i);
            return true;
        }
    }
    return false;
}

} // namespace

int term_rank(const SystemJacobian& jac) {
    if (jac.rows() == 0) return 0;
    std::vector<int> match_col(jac.cols(), -1);
    int size = 0;
    for (std::size_t i = 0; i < jac.rows(); ++i) {
        std::vector<bool> visited(jac.cols(), false);
        if (augment_pattern(i, jac.pattern, match_col, visited)) ++size;
    }
    return size;
}

int structural_rank(const SystemJacobian& jac, const ZeroTestConfig& cfg) {
    return symbolic_rank(jac.entries, cfg);
}

std::vector<std::vector<double>>
eval_matrix(const ExprMatrix& m, const Point& p,
            const std::map<std::string, double>& params) {
    std::vector<std::vector<double>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].reserve(m[i].size());
        for (const Expr& e : m[i])
            out[i].push_back(eval_at_point(e, p, params, /*strict=*/false));
    }
    return out;
}

double numeric_determinant(const std::vector<std::vector<double>>& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
    return a.determinant();
}

bool numerically_singular(const std::vector<std::vector<double>>& m,
                          double tol) {
    const auto n = static_cast<Eigen::Index>(m.size());
    if (n == 0) return false;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
    // Ruiz equilibration strips unit-choice scaling off rows and columns.
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = a.row(i).cwiseAbs().maxCoeff();
            if (r > 0) a.row(i) /= std::sqrt(r);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            double c = a.col(j).cwiseAbs().maxCoeff();
            if (c > 0) a.col(j) /= std::sqrt(c);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    double smax = svd.singularValues()(0);
    if (smax <= 0) return true;
    double smin = svd.singularValues()(n - 1);
    return smin <= tol * smax;
}

FailureClass classify_failure(const DaeSystem& sys, const DualSolution& dual,
                              const SystemJacobian& jac,
                              const ZeroTestConfig& cfg_in) {
    ZeroTestConfig cfg = sys.analysis_config(cfg_in);
    if (!dual.delta_hat) return FailureClass::NoPerfectMatching;
    const auto n = static_cast<int>(sys.equation_count());
    if (structural_rank(jac, cfg) < n)
        return FailureClass::IdenticallySingular;
    if (sys.base_point()) {
        auto numeric = eval_matrix(jac.entries, *sys.base_point(), sys.params());
        if (numerically_singular(numeric))
            return FailureClass::PointSingularCandidate;
    }
    return FailureClass::Ok;
}

} // namespace daerelax
