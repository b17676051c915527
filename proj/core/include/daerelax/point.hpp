// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_POINT_HPP
#define DAERELAX_POINT_HPP

#include <daerelax/expr.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace daerelax {

/// A concrete evaluation point: a time value plus assignments for variable
/// slots. Key order is deterministic (std::map).
struct Point {
    double t = 0.0;
    std::map<VarSlot, double> values;

    std::optional<double> get(const VarSlot& slot) const {
        auto it = values.find(slot);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
    void set(const VarSlot& slot, double v) { values[slot] = v; }
};

/// Configuration of the probabilistic zero test: simplify, then sample the
/// expression on a box around a center point (the system base point when one
/// is known). One-sided error: a nonzero function vanishing at every sample
/// is misjudged as zero; the probability decays with the sample count and
/// the test is reproducible under a fixed seed.
struct ZeroTestConfig {
    int samples = 8;
    double box_radius = 1.0;
    double abs_tol = 1e-10;
    std::uint64_t seed = 20240527;

    std::optional<Point> center;             // sampling box center
    std::map<std::string, double> params;    // fixed parameter bindings

    ZeroTestConfig with_seed(std::uint64_t s) const {
        ZeroTestConfig c = *this;
        c.seed = s;
        return c;
    }
};

/// Environment for numeric evaluation.
struct EvalEnv {
    double t = 0.0;
    const std::map<VarSlot, double>* slots = nullptr;
    const std::map<std::string, double>* params = nullptr;
    bool strict = true; // false: missing slots evaluate to 0
};

/// Evaluates to double precision; throws EvalDomainError on undefined
/// operations, nonfinite intermediates, or missing bindings (strict mode).
/// `err_bound`, when given, receives a first-order bound on the rounding
/// error of the result, so callers can tell a tiny value from cancellation
/// noise.
double eval(const Expr& e, const EvalEnv& env, double* err_bound = nullptr);

double eval_at_point(const Expr& e, const Point& p,
                     const std::map<std::string, double>& params,
                     bool strict = true);

/// True iff simplify(e) is the zero literal or |e| stays within the absolute
/// tolerance at every sampled point. Samples hitting undefined evaluations
/// are redrawn; 100 consecutive failures raise SampleDomainError.
bool is_identically_zero(const Expr& e, const ZeroTestConfig& cfg);

/// Quotient construction guarded by the zero test on the denominator.
Expr checked_div(const Expr& num, const Expr& den, const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
