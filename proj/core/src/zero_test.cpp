// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/point.hpp>

#include <daerelax/calculus.hpp>
#include <daerelax/errors.hpp>

#include <cmath>
#include <random>

namespace daerelax {

bool is_identically_zero(const Expr& e, const ZeroTestConfig& cfg) {
    Expr s = simplify(e);
    if (s.is_zero()) return true;
    if (s.is_num()) return false;

    ExprSupport support = collect_support(s);

    // Per-expression seed: deterministic for a given expression and config,
    // decorrelated across expressions.
    std::mt19937_64 rng(cfg.seed ^ s.hash());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const Point* center = cfg.center ? &*cfg.center : nullptr;

    int successes = 0;
    int consecutive_failures = 0;
    while (successes < std::max(1, cfg.samples)) {
        double tc = center ? center->t : 0.0;
        std::map<VarSlot, double> slots;
        for (const VarSlot& slot : support.slots) {
            double c = 0.0;
            if (center) {
                if (auto v = center->get(slot)) c = *v;
            }
            slots[slot] = c + cfg.box_radius * unit(rng);
        }
        std::map<std::string, double> params;
        for (const std::string& p : support.params) {
            if (p == "pi") continue;
            auto it = cfg.params.find(p);
            if (it != cfg.params.end()) {
                params[p] = it->second;
            } else {
                // unbound parameters are treated generically
                params[p] = cfg.box_radius * unit(rng);
            }
        }
        EvalEnv env;
        env.t = tc + (support.uses_time ? cfg.box_radius * unit(rng) : 0.0);
        env.slots = &slots;
        env.params = &params;
        try {
            // A sample witnesses "nonzero" only when the value clears both
            // the configured tolerance and the rounding-error bound of its
            // own computation; cancellation noise never counts as a witness.
            double err = 0;
            double v = eval(s, env, &err);
            consecutive_failures = 0;
            if (std::abs(v) > std::max(cfg.abs_tol, 64.0 * err)) return false;
            ++successes;
        } catch (const EvalDomainError&) {
            if (++consecutive_failures >= 100)
                throw SampleDomainError(
                    "100 consecutive samples hit undefined evaluations while "
                    "zero-testing: " + s.to_string());
        }
    }
    return true;
}

Expr checked_div(const Expr& num, const Expr& den, const ZeroTestConfig& cfg) {
    if (is_identically_zero(den, cfg))
        throw DivisionByZeroExprError("division by an expression the zero test "
                                      "accepts as zero: " + den.to_string());
    return simplify(Expr::div(num, den));
}

} // namespace daerelax
