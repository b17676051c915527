// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/expr.hpp>

#include <daerelax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace daerelax {

// ---------------------------------------------------------------- rational

double rational_to_double(const Rational& r) {
    return r.convert_to<double>();
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x))
        throw EvalDomainError("cannot convert nonfinite double to rational");
    if (x == 0.0) return Rational(0);
    int exp2 = 0;
    double m = std::frexp(x, &exp2); // x = m * 2^exp2, 0.5 <= |m| < 1
    // 53 doublings make the mantissa integral.
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    exp2 -= 53;
    Rational r(mant);
    if (exp2 > 0)
        r *= rational_pow(Rational(2), exp2);
    else if (exp2 < 0)
        r /= rational_pow(Rational(2), -exp2);
    return r;
}

std::optional<Rational> rational_from_decimal(const std::string& text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool negative = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    BigInt digits = 0;
    long frac_digits = 0;
    bool any_digit = false;
    for (; i < n && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        digits = digits * 10 + (text[i] - '0');
        any_digit = true;
    }
    if (i < n && text[i] == '.') {
        ++i;
        for (; i < n && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            digits = digits * 10 + (text[i] - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    if (!any_digit) return std::nullopt;
    long exp10 = 0;
    if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < n && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        if (i == n || !std::isdigit(static_cast<unsigned char>(text[i])))
            return std::nullopt;
        for (; i < n && std::isdigit(static_cast<unsigned char>(text[i])); ++i)
            exp10 = exp10 * 10 + (text[i] - '0');
        if (eneg) exp10 = -exp10;
    }
    if (i != n) return std::nullopt;
    Rational r(digits);
    long net = exp10 - frac_digits;
    if (net > 0)
        r *= rational_pow(Rational(10), net);
    else if (net < 0)
        r /= rational_pow(Rational(10), -net);
    if (negative) r = -r;
    return r;
}

Rational rational_pow(const Rational& r, long k) {
    if (k == 0) return Rational(1);
    bool invert = k < 0;
    unsigned long e = invert ? static_cast<unsigned long>(-(k + 1)) + 1ul
                             : static_cast<unsigned long>(k);
    Rational base = r, acc(1);
    while (e) {
        if (e & 1ul) acc *= base;
        base *= base;
        e >>= 1;
    }
    if (invert) {
        if (acc == 0) throw EvalDomainError("0 raised to a negative power");
        acc = Rational(1) / acc;
    }
    return acc;
}

namespace {

std::optional<BigInt> int_root(const BigInt& v, long k) {
    if (v < 0) return std::nullopt;
    if (v == 0 || v == 1) return v;
    BigInt lo = 1, hi = v;
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        BigInt p = 1;
        bool over = false;
        for (long i = 0; i < k; ++i) {
            p *= mid;
            if (p > v) { over = true; break; }
        }
        if (over)
            hi = mid - 1;
        else
            lo = mid;
    }
    BigInt p = 1;
    for (long i = 0; i < k; ++i) p *= lo;
    if (p == v) return lo;
    return std::nullopt;
}

} // namespace

std::optional<Rational> rational_root(const Rational& r, long k) {
    if (k <= 0) return std::nullopt;
    if (r < 0) return std::nullopt;
    auto num = int_root(numerator(r), k);
    if (!num) return std::nullopt;
    auto den = int_root(denominator(r), k);
    if (!den) return std::nullopt;
    return Rational(*num, *den);
}

std::string rational_to_string(const Rational& r) {
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    if (den == 1) return num.str();
    // Try to express 1/den as 10^-k via den = 2^a 5^b.
    BigInt d = den;
    long twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d == 1) {
        long k = std::max(twos, fives);
        if (k <= 64) {
            BigInt scaled = num * rational_pow(Rational(10), k).convert_to<BigInt>() / den;
            bool neg = scaled < 0;
            std::string digits = (neg ? -scaled : scaled).str();
            if (static_cast<long>(digits.size()) <= k)
                digits.insert(0, k + 1 - digits.size(), '0');
            digits.insert(digits.size() - k, ".");
            // trim trailing zeros but keep at least one fractional digit
            while (digits.back() == '0' && digits[digits.size() - 2] != '.')
                digits.pop_back();
            return (neg ? "-" : "") + digits;
        }
    }
    return num.str() + "/" + den.str();
}

// -------------------------------------------------------------------- expr

const char* func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
    }
    return "?";
}

namespace {

constexpr long kSizeCap = 1L << 40;

std::size_t hash_mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

std::size_t hash_string(const std::string& s) {
    return std::hash<std::string>{}(s);
}

std::size_t hash_rational(const Rational& r) {
    return hash_mix(hash_string(numerator(r).str()),
                    hash_string(denominator(r).str()));
}

} // namespace

Expr Expr::make(detail::ExprNode&& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 0x9e3779b1u;
    long size = 1;
    int mvo = -1;
    switch (n.kind) {
    case ExprKind::Time:
        break;
    case ExprKind::Var:
    case ExprKind::Aux:
        h = hash_mix(h, hash_string(n.name));
        h = hash_mix(h, static_cast<std::size_t>(n.order));
        mvo = n.order;
        break;
    case ExprKind::Param:
        h = hash_mix(h, hash_string(n.name));
        break;
    case ExprKind::Num:
        h = hash_mix(h, hash_rational(n.value));
        break;
    case ExprKind::Pow:
        h = hash_mix(h, hash_rational(n.value));
        break;
    default:
        break;
    }
    if (n.kind == ExprKind::Call)
        h = hash_mix(h, static_cast<std::size_t>(n.fn));
    for (const Expr& k : n.kids) {
        h = hash_mix(h, k.hash());
        size = std::min(kSizeCap, size + k.tree_size());
        mvo = std::max(mvo, k.max_var_order());
    }
    n.hash = h;
    n.tree_size = size;
    n.max_var_order = mvo;
    return Expr(std::make_shared<const detail::ExprNode>(std::move(n)));
}

namespace {
const Expr& zero_expr() {
    static const Expr z = Expr::num(0);
    return z;
}
} // namespace

Expr::Expr() : node_(nullptr) { *this = zero_expr(); }

Expr Expr::time() {
    detail::ExprNode n;
    n.kind = ExprKind::Time;
    return make(std::move(n));
}

Expr Expr::var(std::string name, int order) {
    if (order < 0) throw Error("derivative order must be nonnegative");
    detail::ExprNode n;
    n.kind = ExprKind::Var;
    n.name = std::move(name);
    n.order = order;
    return make(std::move(n));
}

Expr Expr::aux(std::string name, int order) {
    if (order < 0) throw Error("derivative order must be nonnegative");
    detail::ExprNode n;
    n.kind = ExprKind::Aux;
    n.name = std::move(name);
    n.order = order;
    return make(std::move(n));
}

Expr Expr::num(Rational v) {
    detail::ExprNode n;
    n.kind = ExprKind::Num;
    n.value = std::move(v);
    return make(std::move(n));
}

Expr Expr::num(long v) { return num(Rational(v)); }

Expr Expr::param(std::string name) {
    detail::ExprNode n;
    n.kind = ExprKind::Param;
    n.name = std::move(name);
    return make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> kids) {
    if (kids.empty()) return num(0);
    if (kids.size() == 1) return kids.front();
    detail::ExprNode n;
    n.kind = ExprKind::Sum;
    n.kids = std::move(kids);
    return make(std::move(n));
}

Expr Expr::prod(std::vector<Expr> kids) {
    if (kids.empty()) return num(1);
    if (kids.size() == 1) return kids.front();
    detail::ExprNode n;
    n.kind = ExprKind::Prod;
    n.kids = std::move(kids);
    return make(std::move(n));
}

Expr Expr::neg(Expr e) {
    detail::ExprNode n;
    n.kind = ExprKind::Neg;
    n.kids = {std::move(e)};
    return make(std::move(n));
}

Expr Expr::div(Expr num_, Expr den) {
    detail::ExprNode n;
    n.kind = ExprKind::Div;
    n.kids = {std::move(num_), std::move(den)};
    return make(std::move(n));
}

Expr Expr::pow(Expr base, Rational exponent) {
    detail::ExprNode n;
    n.kind = ExprKind::Pow;
    n.kids = {std::move(base)};
    n.value = std::move(exponent);
    return make(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
    detail::ExprNode n;
    n.kind = ExprKind::Call;
    n.fn = f;
    n.kids = {std::move(arg)};
    return make(std::move(n));
}

int Expr::compare(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    if (a.hash() != b.hash()) {
        // Hashes differ => trees differ; still need a *stable* order, so fall
        // through to the structural comparison below.
    }
    switch (a.kind()) {
    case ExprKind::Time:
        return 0;
    case ExprKind::Var:
    case ExprKind::Aux: {
        int c = a.name().compare(b.name());
        if (c) return c < 0 ? -1 : 1;
        if (a.var_order() != b.var_order())
            return a.var_order() < b.var_order() ? -1 : 1;
        return 0;
    }
    case ExprKind::Param: {
        int c = a.name().compare(b.name());
        return c == 0 ? 0 : (c < 0 ? -1 : 1);
    }
    case ExprKind::Num: {
        if (a.number() == b.number()) return 0;
        return a.number() < b.number() ? -1 : 1;
    }
    case ExprKind::Call:
        if (a.func() != b.func())
            return static_cast<int>(a.func()) < static_cast<int>(b.func()) ? -1 : 1;
        break;
    case ExprKind::Pow:
        if (a.exponent() != b.exponent())
            return a.exponent() < b.exponent() ? -1 : 1;
        break;
    default:
        break;
    }
    const auto& ka = a.children();
    const auto& kb = b.children();
    if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
    for (std::size_t i = 0; i < ka.size(); ++i) {
        int c = compare(ka[i], kb[i]);
        if (c) return c;
    }
    return 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::neg(b)}); }
Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::prod({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }

// ---------------------------------------------------------------- printing

namespace {

// Precedence levels: sum 1, product 2, unary minus 2, power 3, atom 4.
void print(std::ostream& os, const Expr& e, int parent_prec);

void print_wrapped(std::ostream& os, const Expr& e, int prec, int parent_prec) {
    if (prec < parent_prec) {
        os << '(';
        print(os, e, 0);
        os << ')';
    } else {
        print(os, e, parent_prec);
    }
}

bool prints_negative(const Expr& e) {
    return e.kind() == ExprKind::Neg ||
           (e.kind() == ExprKind::Num && e.number() < 0);
}

void print(std::ostream& os, const Expr& e, int parent_prec) {
    switch (e.kind()) {
    case ExprKind::Time:
        os << 't';
        return;
    case ExprKind::Var:
    case ExprKind::Aux:
        if (e.var_order() <= 3) {
            os << e.name();
            for (int i = 0; i < e.var_order(); ++i) os << '\'';
        } else {
            os << "der(" << e.name() << ", " << e.var_order() << ')';
        }
        return;
    case ExprKind::Param:
        os << e.name();
        return;
    case ExprKind::Num: {
        const bool neg = e.number() < 0;
        if (neg && parent_prec > 1) {
            os << '(' << rational_to_string(e.number()) << ')';
        } else {
            os << rational_to_string(e.number());
        }
        return;
    }
    case ExprKind::Sum: {
        if (parent_prec > 1) os << '(';
        bool first = true;
        for (const Expr& k : e.children()) {
            if (!first && !prints_negative(k)) os << " + ";
            if (!first && prints_negative(k)) {
                os << " - ";
                if (k.kind() == ExprKind::Neg) {
                    print(os, k.children()[0], 2);
                } else {
                    os << rational_to_string(-k.number());
                }
                first = false;
                continue;
            }
            print(os, k, first ? 1 : 2);
            first = false;
        }
        if (parent_prec > 1) os << ')';
        return;
    }
    case ExprKind::Prod: {
        if (parent_prec > 2) os << '(';
        bool first = true;
        for (const Expr& k : e.children()) {
            if (!first) os << '*';
            print_wrapped(os, k, k.kind() == ExprKind::Sum ? 1 : 3, 2);
            // product children that are sums/negs get parenthesized by
            // print_wrapped via their own precedence
            if (false) (void)first;
            first = false;
        }
        if (parent_prec > 2) os << ')';
        return;
    }
    case ExprKind::Neg: {
        if (parent_prec > 1) os << '(';
        os << '-';
        // anything composite gets parenthesized so that "-a*b" cannot
        // re-associate as "(-a)*b" on the way back in
        const Expr& c = e.children()[0];
        bool atom = c.kind() == ExprKind::Time || c.kind() == ExprKind::Var ||
                    c.kind() == ExprKind::Aux || c.kind() == ExprKind::Param ||
                    c.kind() == ExprKind::Call ||
                    (c.kind() == ExprKind::Num && c.number() >= 0);
        if (atom) {
            print(os, c, 4);
        } else {
            os << '(';
            print(os, c, 0);
            os << ')';
        }
        if (parent_prec > 1) os << ')';
        return;
    }
    case ExprKind::Div: {
        if (parent_prec > 2) os << '(';
        print_wrapped(os, e.children()[0],
                      e.children()[0].kind() == ExprKind::Sum ||
                              prints_negative(e.children()[0])
                          ? 1
                          : 3,
                      2);
        os << '/';
        // Denominator binds tighter: wrap anything composite.
        const Expr& d = e.children()[1];
        bool atom = d.kind() == ExprKind::Time || d.kind() == ExprKind::Var ||
                    d.kind() == ExprKind::Aux || d.kind() == ExprKind::Param ||
                    d.kind() == ExprKind::Call ||
                    (d.kind() == ExprKind::Num && d.number() >= 0 &&
                     is_integer(d.number()));
        if (atom) {
            print(os, d, 3);
        } else {
            os << '(';
            print(os, d, 0);
            os << ')';
        }
        if (parent_prec > 2) os << ')';
        return;
    }
    case ExprKind::Pow: {
        if (parent_prec > 3) os << '(';
        const Expr& b = e.children()[0];
        bool atom = b.kind() == ExprKind::Time || b.kind() == ExprKind::Var ||
                    b.kind() == ExprKind::Aux || b.kind() == ExprKind::Param ||
                    b.kind() == ExprKind::Call ||
                    (b.kind() == ExprKind::Num && b.number() >= 0);
        if (atom) {
            print(os, b, 4);
        } else {
            os << '(';
            print(os, b, 0);
            os << ')';
        }
        os << '^';
        const Rational& x = e.exponent();
        if (is_integer(x) && x >= 0) {
            os << rational_to_string(x);
        } else {
            os << '(' << rational_to_string(numerator(x));
            if (!is_integer(x)) os << '/' << rational_to_string(denominator(x));
            os << ')';
        }
        if (parent_prec > 3) os << ')';
        return;
    }
    case ExprKind::Call:
        os << func_name(e.func()) << '(';
        print(os, e.children()[0], 0);
        os << ')';
        return;
    }
}

} // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    print(os, *this, 0);
    return os.str();
}

} // namespace daerelax
