// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/point.hpp>

#include <daerelax/errors.hpp>

#include <cmath>
#include <limits>
#include <unordered_map>

namespace daerelax {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked(double v, const char* what) {
    if (!std::isfinite(v))
        throw EvalDomainError(std::string("nonfinite value in ") + what);
    return v;
}

struct Value {
    double v = 0;
    double err = 0; // first-order rounding-error bound
};

class Evaluator {
public:
    explicit Evaluator(const EvalEnv& env) : env_(env) {}

    Value run(const Expr& e) {
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Value v = compute(e);
        if (!std::isfinite(v.err)) v.err = std::numeric_limits<double>::max();
        memo_.emplace(e.id(), v);
        return v;
    }

private:
    double lookup(const VarSlot& slot) {
        if (env_.slots) {
            auto it = env_.slots->find(slot);
            if (it != env_.slots->end()) return it->second;
        }
        if (!env_.strict) return 0.0;
        throw EvalDomainError("no assignment for variable '" + slot.name +
                              "' at order " + std::to_string(slot.order));
    }

    static Value leaf(double v) { return {v, std::abs(v) * kEps}; }

    Value compute(const Expr& e) {
        switch (e.kind()) {
        case ExprKind::Time:
            return leaf(env_.t);
        case ExprKind::Var:
            return leaf(lookup(VarSlot::of_var(e.name(), e.var_order())));
        case ExprKind::Aux:
            return leaf(lookup(VarSlot::of_aux(e.name(), e.var_order())));
        case ExprKind::Num:
            return leaf(checked(rational_to_double(e.number()), "constant"));
        case ExprKind::Param: {
            if (e.name() == "pi") return leaf(M_PI);
            if (env_.params) {
                auto it = env_.params->find(e.name());
                if (it != env_.params->end()) return leaf(it->second);
            }
            throw EvalDomainError("unbound parameter '" + e.name() + "'");
        }
        case ExprKind::Sum: {
            Value acc;
            for (const Expr& k : e.children()) {
                Value x = run(k);
                acc.v += x.v;
                acc.err += x.err + std::abs(acc.v) * kEps;
            }
            checked(acc.v, "sum");
            return acc;
        }
        case ExprKind::Prod: {
            Value acc = leaf(1.0);
            for (const Expr& k : e.children()) {
                Value x = run(k);
                double v = acc.v * x.v;
                acc.err = std::abs(acc.v) * x.err + std::abs(x.v) * acc.err +
                          std::abs(v) * kEps;
                acc.v = v;
            }
            checked(acc.v, "product");
            return acc;
        }
        case ExprKind::Neg: {
            Value x = run(e.children()[0]);
            return {-x.v, x.err};
        }
        case ExprKind::Div: {
            Value den = run(e.children()[1]);
            if (den.v == 0.0) throw EvalDomainError("division by zero");
            Value num = run(e.children()[0]);
            double v = checked(num.v / den.v, "quotient");
            double err = (num.err + std::abs(v) * den.err) / std::abs(den.v) +
                         std::abs(v) * kEps;
            return {v, err};
        }
        case ExprKind::Pow: {
            Value b = run(e.children()[0]);
            const Rational& x = e.exponent();
            double xd = rational_to_double(x);
            double v;
            if (is_integer(x)) {
                long k = x.convert_to<long>();
                if (b.v == 0.0 && k < 0)
                    throw EvalDomainError("zero base with negative exponent");
                v = std::pow(b.v, static_cast<double>(k));
            } else {
                if (b.v < 0.0)
                    throw EvalDomainError(
                        "negative base with fractional exponent");
                if (b.v == 0.0 && x < 0)
                    throw EvalDomainError("zero base with negative exponent");
                v = std::pow(b.v, xd);
            }
            checked(v, "power");
            double deriv =
                b.v == 0.0 ? (xd == 1.0 ? 1.0 : 0.0)
                           : std::abs(xd) * std::abs(v / b.v);
            return {v, deriv * b.err + std::abs(v) * kEps};
        }
        case ExprKind::Call: {
            Value u = run(e.children()[0]);
            double v = 0, deriv = 0;
            switch (e.func()) {
            case Func::Sin:
                v = std::sin(u.v);
                deriv = std::abs(std::cos(u.v));
                break;
            case Func::Cos:
                v = std::cos(u.v);
                deriv = std::abs(std::sin(u.v));
                break;
            case Func::Tan:
                v = checked(std::tan(u.v), "tan");
                deriv = 1.0 + v * v;
                break;
            case Func::Exp:
                v = checked(std::exp(u.v), "exp");
                deriv = v;
                break;
            case Func::Log:
                if (u.v <= 0.0)
                    throw EvalDomainError("log of nonpositive value");
                v = std::log(u.v);
                deriv = 1.0 / u.v;
                break;
            case Func::Tanh:
                v = std::tanh(u.v);
                deriv = 1.0 - v * v;
                break;
            case Func::Sqrt:
                if (u.v < 0.0)
                    throw EvalDomainError("sqrt of negative value");
                v = std::sqrt(u.v);
                deriv = v > 0 ? 0.5 / v : 0.0;
                break;
            }
            return {v, deriv * u.err + std::abs(v) * kEps};
        }
        }
        return {};
    }

    const EvalEnv& env_;
    std::unordered_map<const void*, Value> memo_;
};

} // namespace

double eval(const Expr& e, const EvalEnv& env, double* err_bound) {
    Value v = Evaluator(env).run(e);
    if (err_bound) *err_bound = v.err;
    return v.v;
}

double eval_at_point(const Expr& e, const Point& p,
                     const std::map<std::string, double>& params, bool strict) {
    EvalEnv env;
    env.t = p.t;
    env.slots = &p.values;
    env.params = &params;
    env.strict = strict;
    return eval(e, env);
}

} // namespace daerelax
