// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_TESTS_SUPPORT_HPP
#define DAERELAX_TESTS_SUPPORT_HPP

#include <daerelax/assignment.hpp>
#include <daerelax/calculus.hpp>
#include <daerelax/dae_system.hpp>
#include <daerelax/errors.hpp>
#include <daerelax/parser.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dtest {

using namespace daerelax;

// -- terse expression builders ----------------------------------------------

inline Expr V(const std::string& n, int k = 0) { return Expr::var(n, k); }
inline Expr Y(const std::string& n, int k = 0) { return Expr::aux(n, k); }
inline Expr N(long v) { return Expr::num(v); }
inline Expr N(const std::string& decimal) {
    return Expr::num(*rational_from_decimal(decimal));
}
inline Expr T() { return Expr::time(); }
inline Expr sin_(const Expr& e) { return Expr::call(Func::Sin, e); }
inline Expr cos_(const Expr& e) { return Expr::call(Func::Cos, e); }
inline Expr tan_(const Expr& e) { return Expr::call(Func::Tan, e); }
inline Expr exp_(const Expr& e) { return Expr::call(Func::Exp, e); }
inline Expr log_(const Expr& e) { return Expr::call(Func::Log, e); }
inline Expr tanh_(const Expr& e) { return Expr::call(Func::Tanh, e); }
inline Expr sqrt_(const Expr& e) { return Expr::call(Func::Sqrt, e); }
inline Expr pow_(const Expr& e, long k) { return Expr::pow(e, Rational(k)); }

inline std::string instance_path(const std::string& file) {
    return std::string(DAERELAX_INSTANCE_DIR) + "/" + file;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline DaeSystem load_instance(const std::string& file) {
    return parse_dae(slurp(instance_path(file)));
}

// -- random data --------------------------------------------------------------

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    long integer(long lo, long hi) {
        return std::uniform_int_distribution<long>(lo, hi)(gen);
    }
    bool chance(double p) {
        return std::uniform_real_distribution<double>(0, 1)(gen) < p;
    }
};

/// Random point over the given slots, components in [-1.5, 1.5].
inline Point random_point(Rng& rng, const std::set<VarSlot>& slots) {
    Point p;
    p.t = rng.uniform(-1.5, 1.5);
    for (const VarSlot& s : slots) p.values[s] = rng.uniform(-1.5, 1.5);
    return p;
}

inline Point random_point_for(Rng& rng, const Expr& e) {
    return random_point(rng, collect_support(e).slots);
}

/// Random expression over variables x1..x3 (orders <= max_order) built from
/// domain-safe pieces: polynomials, sin/cos/tanh wrappers, guarded
/// quotients.
inline Expr random_expr(Rng& rng, int depth, int max_order = 2) {
    auto leaf = [&]() -> Expr {
        switch (rng.integer(0, 4)) {
        case 0: return T();
        case 1: return N(rng.integer(-3, 3));
        default:
            return V("x" + std::to_string(rng.integer(1, 3)),
                     static_cast<int>(rng.integer(0, max_order)));
        }
    };
    if (depth <= 0) return leaf();
    switch (rng.integer(0, 6)) {
    case 0:
        return random_expr(rng, depth - 1, max_order) +
               random_expr(rng, depth - 1, max_order);
    case 1:
        return random_expr(rng, depth - 1, max_order) -
               random_expr(rng, depth - 1, max_order);
    case 2:
        return random_expr(rng, depth - 1, max_order) *
               random_expr(rng, depth - 1, max_order);
    case 3:
        return sin_(random_expr(rng, depth - 1, max_order));
    case 4:
        return cos_(random_expr(rng, depth - 1, max_order));
    case 5:
        return tanh_(random_expr(rng, depth - 1, max_order));
    default:
        // quotient with a denominator bounded away from zero
        return random_expr(rng, depth - 1, max_order) /
               (N(2) + pow_(random_expr(rng, depth - 1, max_order), 2) * N(0) +
                pow_(sin_(random_expr(rng, 0, max_order)), 2));
    }
}

/// Smooth closed-form trajectory family with hand-coded derivatives,
/// independent of the symbolic differentiator:
///   x(t) = a sin(bt + c) + d,   x^(k)(t) = a b^k sin(bt + c + k pi/2).
struct SmoothTrajectory {
    struct Channel {
        double a, b, c, d;
    };
    std::map<std::string, Channel> channels;

    static SmoothTrajectory random(Rng& rng,
                                   const std::vector<std::string>& names) {
        SmoothTrajectory tr;
        for (const std::string& n : names)
            tr.channels[n] = {rng.uniform(0.4, 1.6), rng.uniform(0.4, 1.4),
                              rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5)};
        return tr;
    }

    double value(const std::string& name, int order, double t) const {
        const Channel& ch = channels.at(name);
        double k2 = order * M_PI / 2.0;
        double v = ch.a * std::pow(ch.b, order) * std::sin(ch.b * t + ch.c + k2);
        if (order == 0) v += ch.d;
        return v;
    }

    Point at(double t, const std::set<VarSlot>& slots) const {
        Point p;
        p.t = t;
        for (const VarSlot& s : slots)
            p.values[s] = value(s.name, s.order, t);
        return p;
    }
};

/// Exhaustive maximum-weight perfect-matching value over all permutations
/// (n <= 8), the brute-force counterpart of the assignment solver.
inline std::optional<long> brute_force_delta(const SignatureMatrix& sig) {
    const std::size_t n = sig.rows;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::optional<long> best;
    do {
        long w = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (!sig.finite(i, perm[i]))
                ok = false;
            else
                w += *sig.at(i, perm[i]);
        }
        if (ok && (!best || w > *best)) best = w;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline constexpr double kPi = 3.14159265358979323846;

/// Degenerate-instance generator: a random block-triangular base system with
/// affine highest orders and one dominated row, pushed through a random
/// nonsingular integer row mix. The mixed system keeps the base solution set
/// but its system Jacobian w.r.t. the minimal dual is identically singular
/// (the dominated row contributes a zero row at tight orders).
inline DaeSystem make_degenerate_system(Rng& rng, std::size_t n) {
    std::vector<std::string> vars;
    for (std::size_t j = 0; j < n; ++j)
        vars.push_back("x" + std::to_string(j + 1));
    std::vector<int> top(n);
    for (int& d : top) d = static_cast<int>(rng.integer(1, 2));
    std::vector<Expr> base;
    static const long primes[] = {2, 3, 5, 7, 11, 13};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // leading derivative of the row's own variable, affinely
        Expr e = N(primes[i]) * V(vars[i], top[i]);
        if (rng.chance(0.5)) e = e + (N(2) + sin_(V(vars[i]))) * V(vars[i], top[i]);
        // every column's highest order must live in these rows; row 0 hosts
        // the last column's top derivative
        if (i == 0) e = e + N(primes[n - 1]) * V(vars[n - 1], top[n - 1]);
        for (std::size_t j = 0; j < n; ++j)
            if (rng.chance(0.5))
                e = e + N(rng.integer(-2, 2)) *
                            V(vars[j], static_cast<int>(
                                           rng.integer(0, top[j] - 1))) +
                    (rng.chance(0.3) ? sin_(V(vars[j])) : N(0));
        base.push_back(e);
    }
    {
        // last row: orders strictly below every column's maximum
        Expr e = N(rng.integer(1, 3)) * V(vars[n - 1]);
        for (std::size_t j = 0; j < n; ++j)
            if (rng.chance(0.6))
                e = e + N(rng.integer(-2, 2)) *
                            V(vars[j],
                              static_cast<int>(rng.integer(0, top[j] - 1)));
        base.push_back(e);
    }
    // random integer mix with nonzero determinant
    std::vector<std::vector<long>> a(n, std::vector<long>(n));
    while (true) {
        for (auto& row : a)
            for (long& v : row) v = rng.integer(-2, 2);
        // exact integer determinant by expansion (n <= 4)
        std::function<long(std::vector<std::vector<long>>)> det =
            [&](std::vector<std::vector<long>> m) -> long {
            if (m.size() == 1) return m[0][0];
            long acc = 0, sign = 1;
            for (std::size_t c = 0; c < m.size(); ++c) {
                std::vector<std::vector<long>> sub;
                for (std::size_t r = 1; r < m.size(); ++r) {
                    sub.emplace_back();
                    for (std::size_t cc = 0; cc < m.size(); ++cc)
                        if (cc != c) sub.back().push_back(m[r][cc]);
                }
                acc += sign * m[0][c] * det(sub);
                sign = -sign;
            }
            return acc;
        };
        if (det(a) != 0) break;
    }
    std::vector<Expr> mixed;
    for (std::size_t h = 0; h < n; ++h) {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n; ++i)
            if (a[h][i] != 0) terms.push_back(N(a[h][i]) * base[i]);
        if (terms.empty()) terms.push_back(N(0));
        mixed.push_back(simplify(Expr::sum(std::move(terms))));
    }
    return DaeSystem(mixed, vars);
}

// -- recurring fixture systems ----------------------------------------------

/// {x1' + x2' + x3 = 0, x1' + x2' = 0, x2 + x3' = 0}
inline DaeSystem make_intro() {
    return DaeSystem({V("x1", 1) + V("x2", 1) + V("x3"),
                      V("x1", 1) + V("x2", 1), V("x2") + V("x3", 1)},
                     {"x1", "x2", "x3"});
}

/// {x1' x2' - 2 cos^2 t = 0, x1'^2 x2'^2 + x1 + x2 - 4 cos^4 t - 3 sin t - 2}
inline DaeSystem make_lcfail() {
    Expr f1 = V("x1", 1) * V("x2", 1) - N(2) * pow_(cos_(T()), 2);
    Expr f2 = pow_(V("x1", 1), 2) * pow_(V("x2", 1), 2) + V("x1") + V("x2") -
              N(4) * Expr::pow(cos_(T()), Rational(4)) - N(3) * sin_(T()) -
              N(2);
    return DaeSystem({f1, f2}, {"x1", "x2"});
}

inline TrajectoryFixture make_lcfail_trajectory() {
    TrajectoryFixture fix;
    fix.closed_forms["x1"] = simplify(sin_(T()) + N(1));
    fix.closed_forms["x2"] = simplify(N(2) * sin_(T()) + N(1));
    for (int i = 0; i <= 10; ++i) fix.grid.push_back(0.1 * i);
    return fix;
}

/// {x1^2 + (x2 - 1)^2 = 0, 0 = 0}: solvable but no perfect matching
inline DaeSystem make_no_matching_example() {
    return DaeSystem({pow_(V("x1"), 2) + pow_(V("x2") - N(1), 2), N(0)},
                     {"x1", "x2"});
}

/// {x1^2 = 0, (x2 - 1)^2 = 0}: singular exactly at the consistent point
inline DaeSystem make_point_singular_example() {
    Point base;
    base.values[VarSlot::of_var("x1", 0)] = 0;
    base.values[VarSlot::of_var("x2", 0)] = 1;
    return DaeSystem({pow_(V("x1"), 2), pow_(V("x2") - N(1), 2)}, {"x1", "x2"},
                     {}, base);
}

} // namespace dtest

#endif
