// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_EXPR_HPP
#define DAERELAX_EXPR_HPP

#include <daerelax/rational.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace daerelax {

enum class ExprKind : std::uint8_t {
    Time,   // the independent variable t
    Var,    // x_j^(k): a differential variable at derivative order k
    Aux,    // y^(k): an auxiliary variable born algebraic (order 0); later
            // modification rounds may differentiate it like any unknown
    Num,    // exact rational constant
    Param,  // named scalar parameter, fixed over the whole domain
    Sum,
    Prod,
    Neg,
    Div,
    Pow,    // base raised to a fixed rational exponent
    Call,   // elementary function application
};

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Log, Tanh, Sqrt };

const char* func_name(Func f);

class Expr;

namespace detail {
struct ExprNode {
    ExprKind kind;
    Func fn = Func::Sin;
    int order = 0;            // Var
    std::string name;         // Var / Aux / Param
    Rational value;           // Num payload or Pow exponent
    std::vector<Expr> kids;
    std::size_t hash = 0;
    long tree_size = 1;       // saturating node count
    int max_var_order = -1;   // largest Var order in the subtree, -1 if none
};
} // namespace detail

/// Immutable expression handle with value semantics. Structurally equal
/// trees compare equal; sharing is free and thread-safe.
class Expr {
public:
    Expr(); // zero

    static Expr time();
    static Expr var(std::string name, int order);
    static Expr aux(std::string name, int order = 0);
    static Expr num(Rational v);
    static Expr num(long v);
    static Expr param(std::string name);
    static Expr sum(std::vector<Expr> kids);
    static Expr prod(std::vector<Expr> kids);
    static Expr neg(Expr e);
    static Expr div(Expr num, Expr den);
    static Expr pow(Expr base, Rational exponent);
    static Expr call(Func f, Expr arg);

    ExprKind kind() const { return node_->kind; }
    const std::string& name() const { return node_->name; }
    int var_order() const { return node_->order; }
    const Rational& number() const { return node_->value; }
    const Rational& exponent() const { return node_->value; }
    Func func() const { return node_->fn; }
    const std::vector<Expr>& children() const { return node_->kids; }

    bool is_num() const { return kind() == ExprKind::Num; }
    bool is_zero() const { return is_num() && node_->value == 0; }
    bool is_one() const { return is_num() && node_->value == 1; }

    std::size_t hash() const { return node_->hash; }
    long tree_size() const { return node_->tree_size; }
    int max_var_order() const { return node_->max_var_order; }

    /// Identity of the underlying node; used for per-call memo tables.
    const void* id() const { return node_.get(); }

    /// Deterministic total order; defines canonical term/factor ordering.
    static int compare(const Expr& a, const Expr& b);

    friend bool struct_equal(const Expr& a, const Expr& b) {
        return Expr::compare(a, b) == 0;
    }

    std::string to_string() const;

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n)
        : node_(std::move(n)) {}
    static Expr make(detail::ExprNode&& n);

    std::shared_ptr<const detail::ExprNode> node_;
};

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const {
        return Expr::compare(a, b) < 0;
    }
};

// Convenience builders; these construct plain nodes and do not simplify.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// A variable slot (name, aux flag, derivative order) as used in points,
/// substitution maps and Jacobian columns.
struct VarSlot {
    std::string name;
    bool aux = false;
    int order = 0;

    auto operator<=>(const VarSlot&) const = default;

    static VarSlot of_var(std::string n, int k) { return {std::move(n), false, k}; }
    static VarSlot of_aux(std::string n, int k = 0) { return {std::move(n), true, k}; }
};

using SubstMap = std::map<VarSlot, Expr>;

/// Bounded simplification: constant folding, 0/1 absorption, like-term and
/// like-factor collection, monomial-quotient distribution, small product
/// expansion, the trig-square identity. Idempotent; value-preserving.
Expr simplify(const Expr& e);

} // namespace daerelax

#endif
