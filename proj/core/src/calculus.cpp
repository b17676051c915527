// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/calculus.hpp>

#include <daerelax/errors.hpp>

#include <unordered_map>

namespace daerelax {

namespace {

class Differentiator {
public:
    Expr run(const Expr& e) {
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Expr d = derive(e);
        memo_.emplace(e.id(), d);
        return d;
    }

private:
    Expr derive(const Expr& e) {
        switch (e.kind()) {
        case ExprKind::Time:
            return Expr::num(1);
        case ExprKind::Var:
            return Expr::var(e.name(), e.var_order() + 1);
        case ExprKind::Aux:
            return Expr::aux(e.name(), e.var_order() + 1);
        case ExprKind::Num:
        case ExprKind::Param:
            return Expr::num(0);
        case ExprKind::Sum: {
            std::vector<Expr> kids;
            kids.reserve(e.children().size());
            for (const Expr& k : e.children()) kids.push_back(run(k));
            return Expr::sum(std::move(kids));
        }
        case ExprKind::Prod: {
            const auto& ks = e.children();
            std::vector<Expr> terms;
            terms.reserve(ks.size());
            for (std::size_t i = 0; i < ks.size(); ++i) {
                std::vector<Expr> fs = ks;
                fs[i] = run(ks[i]);
                terms.push_back(Expr::prod(std::move(fs)));
            }
            return Expr::sum(std::move(terms));
        }
        case ExprKind::Neg:
            return Expr::neg(run(e.children()[0]));
        case ExprKind::Div: {
            const Expr& a = e.children()[0];
            const Expr& b = e.children()[1];
            Expr num = run(a) * b - a * run(b);
            return Expr::div(num, Expr::pow(b, Rational(2)));
        }
        case ExprKind::Pow: {
            const Expr& b = e.children()[0];
            const Rational& r = e.exponent();
            if (r == 0) return Expr::num(0);
            return Expr::prod(
                {Expr::num(r), Expr::pow(b, r - 1), run(b)});
        }
        case ExprKind::Call: {
            const Expr& u = e.children()[0];
            Expr du = run(u);
            Expr outer;
            switch (e.func()) {
            case Func::Sin:
                outer = Expr::call(Func::Cos, u);
                break;
            case Func::Cos:
                outer = Expr::neg(Expr::call(Func::Sin, u));
                break;
            case Func::Tan:
                outer = Expr::num(1) + Expr::pow(Expr::call(Func::Tan, u), Rational(2));
                break;
            case Func::Exp:
                outer = e;
                break;
            case Func::Log:
                outer = Expr::div(Expr::num(1), u);
                break;
            case Func::Tanh:
                outer = Expr::num(1) - Expr::pow(Expr::call(Func::Tanh, u), Rational(2));
                break;
            case Func::Sqrt:
                outer = Expr::prod({Expr::num(Rational(1, 2)),
                                    Expr::pow(u, Rational(-1, 2))});
                break;
            }
            return outer * du;
        }
        }
        return Expr::num(0);
    }

    std::unordered_map<const void*, Expr> memo_;
};

class PartialDiff {
public:
    explicit PartialDiff(const VarSlot& slot) : slot_(slot) {}

    Expr run(const Expr& e) {
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Expr d = derive(e);
        memo_.emplace(e.id(), d);
        return d;
    }

private:
    Expr derive(const Expr& e) {
        switch (e.kind()) {
        case ExprKind::Time:
        case ExprKind::Num:
        case ExprKind::Param:
            return Expr::num(0);
        case ExprKind::Var:
            return (!slot_.aux && e.name() == slot_.name &&
                    e.var_order() == slot_.order)
                       ? Expr::num(1)
                       : Expr::num(0);
        case ExprKind::Aux:
            return (slot_.aux && e.name() == slot_.name &&
                    e.var_order() == slot_.order)
                       ? Expr::num(1)
                       : Expr::num(0);
        case ExprKind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(run(k));
            return Expr::sum(std::move(kids));
        }
        case ExprKind::Prod: {
            const auto& ks = e.children();
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                std::vector<Expr> fs = ks;
                fs[i] = run(ks[i]);
                terms.push_back(Expr::prod(std::move(fs)));
            }
            return Expr::sum(std::move(terms));
        }
        case ExprKind::Neg:
            return Expr::neg(run(e.children()[0]));
        case ExprKind::Div: {
            const Expr& a = e.children()[0];
            const Expr& b = e.children()[1];
            return Expr::div(run(a) * b - a * run(b), Expr::pow(b, Rational(2)));
        }
        case ExprKind::Pow: {
            const Expr& b = e.children()[0];
            const Rational& r = e.exponent();
            if (r == 0) return Expr::num(0);
            return Expr::prod({Expr::num(r), Expr::pow(b, r - 1), run(b)});
        }
        case ExprKind::Call: {
            const Expr& u = e.children()[0];
            Expr du = run(u);
            Expr outer;
            switch (e.func()) {
            case Func::Sin: outer = Expr::call(Func::Cos, u); break;
            case Func::Cos: outer = Expr::neg(Expr::call(Func::Sin, u)); break;
            case Func::Tan:
                outer = Expr::num(1) + Expr::pow(Expr::call(Func::Tan, u), Rational(2));
                break;
            case Func::Exp: outer = e; break;
            case Func::Log: outer = Expr::div(Expr::num(1), u); break;
            case Func::Tanh:
                outer = Expr::num(1) - Expr::pow(Expr::call(Func::Tanh, u), Rational(2));
                break;
            case Func::Sqrt:
                outer = Expr::prod({Expr::num(Rational(1, 2)),
                                    Expr::pow(u, Rational(-1, 2))});
                break;
            }
            return outer * du;
        }
        }
        return Expr::num(0);
    }

    VarSlot slot_;
    std::unordered_map<const void*, Expr> memo_;
};

} // namespace

Expr total_derivative(const Expr& e, int times) {
    if (times < 0) throw Error("total_derivative: negative order");
    Expr cur = simplify(e);
    for (int i = 0; i < times; ++i) {
        Differentiator d;
        cur = simplify(d.run(cur));
    }
    return cur;
}

Expr partial(const Expr& e, const VarSlot& slot) {
    if (slot.order < 0) return Expr::num(0);
    PartialDiff d(slot);
    return simplify(d.run(e));
}

Expr partial(const Expr& e, const std::string& var, int order) {
    return partial(e, VarSlot::of_var(var, order));
}

namespace {

Expr substitute_impl(const Expr& e, const SubstMap& map,
                     std::unordered_map<const void*, Expr>& memo) {
    auto it = memo.find(e.id());
    if (it != memo.end()) return it->second;
    Expr out = e;
    switch (e.kind()) {
    case ExprKind::Var: {
        auto f = map.find(VarSlot::of_var(e.name(), e.var_order()));
        if (f != map.end()) out = f->second;
        break;
    }
    case ExprKind::Aux: {
        auto f = map.find(VarSlot::of_aux(e.name(), e.var_order()));
        if (f != map.end()) out = f->second;
        break;
    }
    case ExprKind::Time:
    case ExprKind::Num:
    case ExprKind::Param:
        break;
    default: {
        std::vector<Expr> kids;
        kids.reserve(e.children().size());
        bool changed = false;
        for (const Expr& k : e.children()) {
            kids.push_back(substitute_impl(k, map, memo));
            changed = changed || kids.back().id() != k.id();
        }
        if (changed) {
            switch (e.kind()) {
            case ExprKind::Sum: out = Expr::sum(std::move(kids)); break;
            case ExprKind::Prod: out = Expr::prod(std::move(kids)); break;
            case ExprKind::Neg: out = Expr::neg(kids[0]); break;
            case ExprKind::Div: out = Expr::div(kids[0], kids[1]); break;
            case ExprKind::Pow: out = Expr::pow(kids[0], e.exponent()); break;
            case ExprKind::Call: out = Expr::call(e.func(), kids[0]); break;
            default: break;
            }
        }
        break;
    }
    }
    memo.emplace(e.id(), out);
    return out;
}

} // namespace

Expr substitute(const Expr& e, const SubstMap& map) {
    if (map.empty()) return e;
    std::unordered_map<const void*, Expr> memo;
    return substitute_impl(e, map, memo);
}

namespace {

void collect_impl(const Expr& e, ExprSupport& out,
                  std::unordered_map<const void*, bool>& seen) {
    if (seen.count(e.id())) return;
    seen.emplace(e.id(), true);
    switch (e.kind()) {
    case ExprKind::Time:
        out.uses_time = true;
        break;
    case ExprKind::Var:
        out.slots.insert(VarSlot::of_var(e.name(), e.var_order()));
        break;
    case ExprKind::Aux:
        out.slots.insert(VarSlot::of_aux(e.name(), e.var_order()));
        break;
    case ExprKind::Param:
        out.params.insert(e.name());
        break;
    default:
        break;
    }
    for (const Expr& k : e.children()) collect_impl(k, out, seen);
}

} // namespace

ExprSupport collect_support(const Expr& e) {
    ExprSupport out;
    std::unordered_map<const void*, bool> seen;
    collect_impl(e, out, seen);
    return out;
}

bool occurs(const Expr& e, const VarSlot& slot) {
    if (e.kind() == ExprKind::Var)
        return !slot.aux && e.name() == slot.name && e.var_order() == slot.order;
    if (e.kind() == ExprKind::Aux)
        return slot.aux && e.name() == slot.name && e.var_order() == slot.order;
    for (const Expr& k : e.children())
        if (occurs(k, slot)) return true;
    return false;
}

namespace {

std::optional<int> sigma_impl(const Expr& e, const std::string& name, bool aux,
                              const ZeroTestConfig& cfg) {
    Expr s = simplify(e);
    int max_order = -1;
    for (const VarSlot& slot : collect_support(s).slots) {
        if (slot.aux == aux && slot.name == name)
            max_order = std::max(max_order, slot.order);
    }
    for (int k = max_order; k >= 0; --k) {
        Expr d = partial(s, VarSlot{name, aux, k});
        if (!is_identically_zero(d, cfg)) return k;
    }
    return std::nullopt;
}

} // namespace

std::optional<int> sigma_order(const Expr& e, const std::string& var,
                               const ZeroTestConfig& cfg) {
    return sigma_impl(e, var, false, cfg);
}

std::optional<int> sigma_order_aux(const Expr& e, const std::string& aux,
                                   const ZeroTestConfig& cfg) {
    return sigma_impl(e, aux, true, cfg);
}

} // namespace daerelax
