// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/expr.hpp>

#include <algorithm>
#include <map>
#include <unordered_map>
#include <vector>

namespace daerelax {

namespace {

// The rewrite is bounded by design: no polynomial normal form, just the
// passes below iterated to a fixpoint.
constexpr int kMaxPasses = 16;
constexpr std::size_t kExpandMaxSummands = 16;
constexpr std::size_t kExpandMaxTerms = 128;
constexpr long kExpandMaxNodes = 1536;

// Fully simplified results, shared across calls; sound because inputs are
// immutable and the rewrite is deterministic.
thread_local std::unordered_map<const void*, Expr> g_simplified;

struct Factor {
    Expr base;
    Rational exp;
};

struct Term {
    Rational coeff{1};
    std::vector<Factor> factors; // sorted by base, unique bases

    bool is_zero() const { return coeff == 0; }
};

void add_factor(Term& t, const Expr& base, const Rational& exp) {
    if (exp == 0) return;
    auto it = std::lower_bound(
        t.factors.begin(), t.factors.end(), base,
        [](const Factor& f, const Expr& b) { return Expr::compare(f.base, b) < 0; });
    if (it != t.factors.end() && Expr::compare(it->base, base) == 0) {
        it->exp += exp;
        if (it->exp == 0) t.factors.erase(it);
    } else {
        t.factors.insert(it, Factor{base, exp});
    }
}

void merge_term(Term& into, const Term& from, bool invert) {
    if (into.is_zero()) return;
    if (from.is_zero()) {
        if (invert) {
            // division by a term that folded to zero: keep the zero as an
            // opaque factor so evaluation reports the domain error later
            add_factor(into, Expr::num(0), Rational(-1));
            return;
        }
        into.coeff = 0;
        into.factors.clear();
        return;
    }
    if (invert)
        into.coeff /= from.coeff;
    else
        into.coeff *= from.coeff;
    for (const Factor& f : from.factors)
        add_factor(into, f.base, invert ? -f.exp : f.exp);
}

Term decompose(const Expr& e);

Term decompose_pow(const Expr& base, const Rational& exp) {
    Term t;
    if (exp == 0) return t; // x^0 == 1 under field semantics
    if (base.is_num()) {
        const Rational& b = base.number();
        if (is_integer(exp) && !(b == 0 && exp < 0)) {
            t.coeff = rational_pow(b, exp.convert_to<long>());
            return t;
        }
        if (!is_integer(exp) && b >= 0 && denominator(exp) <= 8) {
            auto root = rational_root(b, denominator(exp).convert_to<long>());
            if (root) {
                t.coeff = rational_pow(*root, numerator(exp).convert_to<long>());
                return t;
            }
        }
        add_factor(t, base, exp);
        return t;
    }
    if (is_integer(exp)) {
        // integer exponents distribute over any factorization
        Term inner = decompose(base);
        if (inner.is_zero()) {
            if (exp < 0) {
                add_factor(t, Expr::num(0), Rational(-1));
                return t;
            }
            t.coeff = 0;
            return t;
        }
        long k = exp.convert_to<long>();
        t.coeff = rational_pow(inner.coeff, k);
        for (const Factor& f : inner.factors) add_factor(t, f.base, f.exp * exp);
        return t;
    }
    if (base.kind() == ExprKind::Var || base.kind() == ExprKind::Aux ||
        base.kind() == ExprKind::Param || base.kind() == ExprKind::Time ||
        base.kind() == ExprKind::Call) {
        add_factor(t, base, exp);
        return t;
    }
    // Fractional power of a composite: kept opaque (sign caveats).
    add_factor(t, Expr::pow(base, exp), Rational(1));
    return t;
}

Term decompose(const Expr& e) {
    Term t;
    switch (e.kind()) {
    case ExprKind::Num:
        t.coeff = e.number();
        return t;
    case ExprKind::Neg: {
        Term inner = decompose(e.children()[0]);
        inner.coeff = -inner.coeff;
        return inner;
    }
    case ExprKind::Prod:
        for (const Expr& k : e.children()) {
            merge_term(t, decompose(k), false);
            if (t.is_zero()) return t;
        }
        return t;
    case ExprKind::Div: {
        t = decompose(e.children()[0]);
        merge_term(t, decompose(e.children()[1]), true);
        return t;
    }
    case ExprKind::Pow:
        return decompose_pow(e.children()[0], e.exponent());
    default:
        add_factor(t, e, Rational(1));
        return t;
    }
}

long term_size(const Term& t) {
    long s = 1;
    for (const Factor& f : t.factors) s += f.base.tree_size() + 1;
    return s;
}

Expr recompose(const Term& t) {
    if (t.is_zero()) return Expr::num(0);
    std::vector<Expr> num_parts;
    std::vector<Expr> den_parts;
    for (const Factor& f : t.factors) {
        bool denom = f.exp < 0;
        Rational mag = denom ? -f.exp : f.exp;
        Expr piece = mag == 1 ? f.base : Expr::pow(f.base, mag);
        (denom ? den_parts : num_parts).push_back(piece);
    }
    Rational c = t.coeff;
    bool negative = c < 0;
    if (negative) c = -c;
    if (num_parts.empty() || c != 1)
        num_parts.insert(num_parts.begin(), Expr::num(c));
    Expr result = num_parts.size() == 1 ? num_parts.front() : Expr::prod(num_parts);
    if (!den_parts.empty()) {
        Expr den = den_parts.size() == 1 ? den_parts.front() : Expr::prod(den_parts);
        result = Expr::div(result, den);
    }
    // Pure numbers carry their own sign; factored terms wrap in a negation.
    if (negative) {
        if (result.is_num()) return Expr::num(-result.number());
        return Expr::neg(result);
    }
    return result;
}

/// Factor vectors are sorted with unique bases, so they can key like-term
/// collection directly.
struct FactorsLess {
    bool operator()(const std::vector<Factor>& a,
                    const std::vector<Factor>& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        for (std::size_t i = 0; i < a.size(); ++i) {
            int c = Expr::compare(a[i].base, b[i].base);
            if (c) return c < 0;
            if (a[i].exp != b[i].exp) return a[i].exp < b[i].exp;
        }
        return false;
    }
};

// Splits terms containing a first-power sum factor, within a budget. This is
// what cancels products against quotients with monomial denominators.
void expand_terms(std::vector<Term>& terms) {
    std::vector<Term> out;
    std::size_t produced = 0;
    std::vector<Term> work(terms.rbegin(), terms.rend());
    while (!work.empty()) {
        Term t = std::move(work.back());
        work.pop_back();
        const Factor* sum_factor = nullptr;
        for (const Factor& f : t.factors) {
            if (f.base.kind() == ExprKind::Sum && f.exp == 1) {
                sum_factor = &f;
                break;
            }
        }
        bool expandable = sum_factor != nullptr;
        if (expandable) {
            std::size_t k = sum_factor->base.children().size();
            if (t.factors.size() == 1) {
                // distributing only a rational coefficient: growth-free
                expandable = produced + k <= 4096;
            } else {
                expandable = k <= kExpandMaxSummands &&
                             produced + k <= kExpandMaxTerms &&
                             static_cast<long>(k) * term_size(t) <= kExpandMaxNodes;
            }
        }
        if (!expandable) {
            out.push_back(std::move(t));
            continue;
        }
        Expr sum = sum_factor->base;
        Term rest = t;
        add_factor(rest, sum, Rational(-1)); // remove one power of the sum
        for (const Expr& s : sum.children()) {
            Term piece = rest;
            merge_term(piece, decompose(s), false);
            if (!piece.is_zero()) {
                ++produced;
                work.push_back(std::move(piece));
            }
        }
    }
    terms = std::move(out);
}

using Collected = std::map<std::vector<Factor>, Rational, FactorsLess>;

void trig_square_pass(Collected& collected) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = collected.begin(); it != collected.end(); ++it) {
            const std::vector<Factor>& fs = it->first;
            for (std::size_t fi = 0; fi < fs.size(); ++fi) {
                const Factor& f = fs[fi];
                if (f.base.kind() != ExprKind::Call || f.base.func() != Func::Sin)
                    continue;
                if (!is_integer(f.exp) || f.exp < 2) continue;
                Expr arg = f.base.children()[0];
                // partner: same term with sin^2 traded for cos^2
                Term partner{Rational(1), fs};
                add_factor(partner, f.base, Rational(-2));
                add_factor(partner, Expr::call(Func::Cos, arg), Rational(2));
                auto pit = collected.find(partner.factors);
                if (pit == collected.end() || pit == it) continue;
                if (pit->second != it->second) continue;
                Rational c = it->second;
                Term reduced{Rational(1), fs};
                add_factor(reduced, f.base, Rational(-2));
                collected.erase(pit);
                collected.erase(it);
                auto [rit, fresh] =
                    collected.emplace(reduced.factors, Rational(0));
                rit->second += c;
                if (rit->second == 0) collected.erase(rit);
                changed = true;
                break;
            }
            if (changed) break;
        }
    }
}

Expr normalize_terms(std::vector<Term> terms) {
    expand_terms(terms);
    Collected collected;
    Rational constant{0};
    for (Term& t : terms) {
        if (t.is_zero()) continue;
        if (t.factors.empty()) {
            constant += t.coeff;
            continue;
        }
        auto [it, fresh] = collected.emplace(std::move(t.factors), Rational(0));
        it->second += t.coeff;
        if (it->second == 0) collected.erase(it);
    }
    trig_square_pass(collected);
    std::vector<Expr> parts;
    parts.reserve(collected.size() + 1);
    for (auto& [factors, coeff] : collected) {
        if (coeff == 0) continue;
        parts.push_back(recompose(Term{coeff, factors}));
    }
    if (constant != 0 || parts.empty()) parts.push_back(Expr::num(constant));
    return Expr::sum(std::move(parts));
}

class Pass {
public:
    Expr run(const Expr& e) {
        auto done = g_simplified.find(e.id());
        if (done != g_simplified.end()) return done->second;
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Expr out = rewrite(e);
        memo_.emplace(e.id(), out);
        return out;
    }

private:
    Expr rewrite(const Expr& e) {
        switch (e.kind()) {
        case ExprKind::Time:
        case ExprKind::Var:
        case ExprKind::Aux:
        case ExprKind::Param:
        case ExprKind::Num:
            return e;
        case ExprKind::Sum: {
            std::vector<Term> terms;
            gather_sum(e, terms);
            return normalize_terms(std::move(terms));
        }
        case ExprKind::Prod:
        case ExprKind::Neg:
        case ExprKind::Div:
        case ExprKind::Pow: {
            Expr rebuilt = rebuild_with_kids(e);
            std::vector<Term> terms;
            terms.push_back(decompose(rebuilt));
            return normalize_terms(std::move(terms));
        }
        case ExprKind::Call:
            return rewrite_call(e);
        }
        return e;
    }

    void gather_sum(const Expr& e, std::vector<Term>& terms) {
        for (const Expr& kid : e.children()) {
            Expr k = run(kid);
            if (k.kind() == ExprKind::Sum) {
                for (const Expr& kk : k.children()) terms.push_back(decompose(kk));
            } else if (k.kind() == ExprKind::Neg &&
                       k.children()[0].kind() == ExprKind::Sum) {
                for (const Expr& kk : k.children()[0].children()) {
                    Term t = decompose(kk);
                    t.coeff = -t.coeff;
                    terms.push_back(std::move(t));
                }
            } else {
                terms.push_back(decompose(k));
            }
        }
    }

    Expr rebuild_with_kids(const Expr& e) {
        std::vector<Expr> kids;
        kids.reserve(e.children().size());
        for (const Expr& k : e.children()) kids.push_back(run(k));
        switch (e.kind()) {
        case ExprKind::Prod:
            return Expr::prod(std::move(kids));
        case ExprKind::Neg:
            return Expr::neg(kids[0]);
        case ExprKind::Div:
            return Expr::div(kids[0], kids[1]);
        case ExprKind::Pow:
            return Expr::pow(kids[0], e.exponent());
        default:
            return e;
        }
    }

    Expr rewrite_call(const Expr& e) {
        Expr arg = run(e.children()[0]);
        Func f = e.func();
        if (f == Func::Sqrt) {
            // canonical power form so exponents merge across factors
            return run(Expr::pow(arg, Rational(1, 2)));
        }
        if (arg.is_num()) {
            const Rational& v = arg.number();
            if (v == 0) {
                switch (f) {
                case Func::Sin:
                case Func::Tan:
                case Func::Tanh:
                    return Expr::num(0);
                case Func::Cos:
                    return Expr::num(1);
                case Func::Exp:
                    return Expr::num(1);
                default:
                    break;
                }
            }
            if (v == 1 && f == Func::Log) return Expr::num(0);
        }
        // odd/even argument sign normalization
        bool arg_negated = arg.kind() == ExprKind::Neg ||
                           (arg.is_num() && arg.number() < 0);
        if (arg_negated) {
            Expr pos = arg.kind() == ExprKind::Neg
                           ? arg.children()[0]
                           : Expr::num(-arg.number());
            switch (f) {
            case Func::Sin:
            case Func::Tan:
            case Func::Tanh:
                return Expr::neg(Expr::call(f, pos));
            case Func::Cos:
                return Expr::call(Func::Cos, pos);
            default:
                break;
            }
        }
        return Expr::call(f, arg);
    }

    std::unordered_map<const void*, Expr> memo_;
};

} // namespace

Expr simplify(const Expr& e) {
    auto hit = g_simplified.find(e.id());
    if (hit != g_simplified.end()) return hit->second;
    Expr cur = e;
    for (int i = 0; i < kMaxPasses; ++i) {
        Pass pass;
        Expr next = pass.run(cur);
        if (struct_equal(next, cur)) break;
        cur = next;
    }
    if (g_simplified.size() > 1000000) g_simplified.clear();
    g_simplified.emplace(e.id(), cur);
    g_simplified.emplace(cur.id(), cur);
    return cur;
}

} // namespace daerelax
