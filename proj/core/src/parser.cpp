// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/parser.hpp>

#include <daerelax/errors.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace daerelax {

namespace {

enum class Tok {
    End,
    Ident,
    Number,
    Punct, // single characters: ; , = { } ( ) + - * / ^ : '
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        skip_space();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_ = {Tok::End, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                s += take();
            tok_ = {Tok::Ident, s, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            std::string s;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.'))
                s += take();
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t save = pos_;
                int save_line = line_, save_col = col_;
                std::string exp;
                exp += take();
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                    exp += take();
                if (pos_ < text_.size() &&
                    std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    while (pos_ < text_.size() &&
                           std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        exp += take();
                    s += exp;
                } else {
                    pos_ = save;
                    line_ = save_line;
                    col_ = save_col;
                }
            }
            tok_ = {Tok::Number, s, tok_.line, tok_.col};
            return;
        }
        tok_ = {Tok::Punct, std::string(1, take()), tok_.line, tok_.col};
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
    }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

const std::map<std::string, Func>& function_table() {
    static const std::map<std::string, Func> t = {
        {"sin", Func::Sin},   {"cos", Func::Cos}, {"tan", Func::Tan},
        {"exp", Func::Exp},   {"log", Func::Log}, {"tanh", Func::Tanh},
        {"sqrt", Func::Sqrt},
    };
    return t;
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    DaeSystem parse_system() {
        while (lex_.peek().kind != Tok::End) {
            Token t = lex_.peek();
            if (t.kind != Tok::Ident)
                lex_.fail("expected a declaration keyword");
            if (t.text == "param")
                parse_param();
            else if (t.text == "var")
                parse_var_list(false);
            else if (t.text == "aux")
                parse_var_list(true);
            else if (t.text == "point")
                parse_point();
            else if (t.text == "eq")
                parse_eq();
            else
                lex_.fail("unknown declaration '" + t.text + "'");
        }
        return DaeSystem(equations_, variables_, params_, base_point_,
                         aux_vars_);
    }

    TrajectoryFixture parse_fixture() {
        expect_ident("trajectory");
        expect_punct("{");
        TrajectoryFixture fix;
        bool have_grid = false;
        while (!accept_punct("}")) {
            Token name = expect(Tok::Ident, "identifier");
            expect_punct("=");
            if (name.text == "grid") {
                double start = signed_number();
                expect_punct(":");
                double step = signed_number();
                expect_punct(":");
                double stop = signed_number();
                if (step <= 0)
                    throw SyntaxError("grid step must be positive", name.line,
                                      name.col);
                for (double v = start; v <= stop + step * 1e-9; v += step)
                    fix.grid.push_back(v);
                have_grid = true;
            } else {
                trajectory_mode_ = true;
                Expr e = parse_expr();
                trajectory_mode_ = false;
                fix.closed_forms[name.text] = simplify(e);
            }
            expect_punct(";");
        }
        if (!have_grid)
            throw SyntaxError("trajectory block needs a grid", 1, 1);
        return fix;
    }

private:
    void parse_param() {
        lex_.next();
        Token name = expect(Tok::Ident, "parameter name");
        if (name.text == "pi")
            throw SyntaxError("'pi' is a builtin constant", name.line, name.col);
        expect_punct("=");
        double v = signed_number();
        expect_punct(";");
        params_[name.text] = v;
        declared_params_.insert(name.text);
    }

    void parse_var_list(bool aux) {
        lex_.next();
        while (true) {
            Token name = expect(Tok::Ident, "variable name");
            if (aux)
                aux_vars_.push_back(name.text);
            else
                variables_.push_back(name.text);
            declared_.insert({name.text, aux});
            if (accept_punct(",")) continue;
            expect_punct(";");
            break;
        }
    }

    void parse_point() {
        lex_.next();
        expect_punct("{");
        Point p;
        while (!accept_punct("}")) {
            Token name = expect(Tok::Ident, "assignment target");
            if (name.text == "t") {
                expect_punct("=");
                p.t = signed_number();
            } else if (name.text == "der") {
                expect_punct("(");
                Token var = expect(Tok::Ident, "variable name");
                expect_punct(",");
                long k = integer();
                expect_punct(")");
                expect_punct("=");
                p.set(resolve_slot(var, static_cast<int>(k)), signed_number());
            } else {
                int primes = 0;
                while (accept_punct("'")) ++primes;
                expect_punct("=");
                p.set(resolve_slot(name, primes), signed_number());
            }
            expect_punct(";");
        }
        base_point_ = p;
    }

    VarSlot resolve_slot(const Token& name, int order) {
        auto it = declared_.find(name.text);
        if (it == declared_.end())
            throw UnknownSymbolError("unknown variable '" + name.text + "'",
                                     name.line, name.col);
        return it->second ? VarSlot::of_aux(name.text, order)
                          : VarSlot::of_var(name.text, order);
    }

    void parse_eq() {
        lex_.next();
        Expr lhs = parse_expr();
        expect_punct("=");
        Expr rhs = parse_expr();
        expect_punct(";");
        equations_.push_back(rhs.is_zero() ? lhs : lhs - rhs);
    }

    // literal quotients and literal negations fold at parse time, so the
    // canonical renderings of rational constants read back structurally
    static Expr fold_neg(const Expr& e) {
        if (e.is_num()) return Expr::num(-e.number());
        return Expr::neg(e);
    }
    static Expr fold_div(const Expr& a, const Expr& b) {
        if (a.is_num() && b.is_num() && b.number() != 0)
            return Expr::num(a.number() / b.number());
        return Expr::div(a, b);
    }

    Expr parse_expr() {
        Expr acc = parse_term();
        while (true) {
            if (accept_punct("+")) {
                acc = acc + parse_term();
            } else if (accept_punct("-")) {
                acc = Expr::sum({acc, fold_neg(parse_term())});
            } else {
                return acc;
            }
        }
    }

    Expr parse_term() {
        Expr acc = parse_unary();
        while (true) {
            if (accept_punct("*")) {
                acc = acc * parse_unary();
            } else if (accept_punct("/")) {
                acc = fold_div(acc, parse_unary());
            } else {
                return acc;
            }
        }
    }

    Expr parse_unary() {
        if (accept_punct("-")) return fold_neg(parse_unary());
        if (accept_punct("+")) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (!accept_punct("^")) return base;
        return Expr::pow(base, parse_exponent());
    }

    Rational parse_exponent() {
        if (accept_punct("(")) {
            bool neg = accept_punct("-");
            Rational num = number_token();
            Rational den(1);
            if (accept_punct("/")) den = number_token();
            expect_punct(")");
            if (den == 0) lex_.fail("zero exponent denominator");
            Rational r = num / den;
            return neg ? -r : r;
        }
        bool neg = accept_punct("-");
        Rational r = number_token();
        return neg ? -r : r;
    }

    Expr parse_atom() {
        Token t = lex_.peek();
        if (t.kind == Tok::Number) {
            return Expr::num(number_token());
        }
        if (accept_punct("(")) {
            Expr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != Tok::Ident) lex_.fail("expected an operand");
        lex_.next();
        if (t.text == "t") return Expr::time();
        if (t.text == "pi") return Expr::param("pi");
        if (t.text == "der") {
            expect_punct("(");
            Token var = expect(Tok::Ident, "variable name");
            expect_punct(",");
            long k = integer();
            expect_punct(")");
            VarSlot slot = resolve_slot(var, static_cast<int>(k));
            return slot.aux ? Expr::aux(slot.name, slot.order)
                            : Expr::var(slot.name, slot.order);
        }
        auto fn = function_table().find(t.text);
        if (fn != function_table().end()) {
            expect_punct("(");
            Expr arg = parse_expr();
            expect_punct(")");
            return Expr::call(fn->second, arg);
        }
        if (trajectory_mode_) {
            if (declared_params_.count(t.text) || declared_.count(t.text))
                throw UnknownSymbolError(
                    "trajectory expressions may depend on t only", t.line,
                    t.col);
            // in fixtures every other identifier is unknown
            throw UnknownSymbolError("unknown identifier '" + t.text + "'",
                                     t.line, t.col);
        }
        if (declared_params_.count(t.text)) {
            if (lex_.peek().kind == Tok::Punct && lex_.peek().text == "'")
                lex_.fail("parameters cannot carry derivatives");
            return Expr::param(t.text);
        }
        int primes = 0;
        while (accept_punct("'")) ++primes;
        VarSlot slot = resolve_slot(t, primes);
        return slot.aux ? Expr::aux(slot.name, slot.order)
                        : Expr::var(slot.name, slot.order);
    }

    Rational number_token() {
        Token t = expect(Tok::Number, "number");
        auto r = rational_from_decimal(t.text);
        if (!r)
            throw SyntaxError("malformed number '" + t.text + "'", t.line,
                              t.col);
        return *r;
    }

    long integer() {
        Token t = expect(Tok::Number, "integer");
        auto r = rational_from_decimal(t.text);
        if (!r || !is_integer(*r))
            throw SyntaxError("expected an integer", t.line, t.col);
        return r->convert_to<long>();
    }

    double signed_number() {
        bool neg = accept_punct("-");
        Rational r = number_token();
        return rational_to_double(neg ? -r : r);
    }

    Token expect(Tok kind, const std::string& what) {
        if (lex_.peek().kind != kind) lex_.fail("expected " + what);
        return lex_.next();
    }

    void expect_punct(const std::string& p) {
        if (!accept_punct(p)) lex_.fail("expected '" + p + "'");
    }

    bool accept_punct(const std::string& p) {
        if (lex_.peek().kind == Tok::Punct && lex_.peek().text == p) {
            lex_.next();
            return true;
        }
        return false;
    }

    void expect_ident(const std::string& word) {
        Token t = expect(Tok::Ident, "'" + word + "'");
        if (t.text != word)
            throw SyntaxError("expected '" + word + "'", t.line, t.col);
    }

    Lexer lex_;
    std::vector<Expr> equations_;
    std::vector<std::string> variables_;
    std::vector<std::string> aux_vars_;
    std::map<std::string, double> params_;
    std::optional<Point> base_point_;
    std::map<std::string, bool> declared_; // name -> is_aux
    std::set<std::string> declared_params_;
    bool trajectory_mode_ = false;
};

std::string format_double(double v) {
    // shortest decimal that parses back to the same double
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return "0";
}

} // namespace

DaeSystem parse_dae(const std::string& text) {
    return Parser(text).parse_system();
}

TrajectoryFixture parse_trajectory(const std::string& text) {
    return Parser(text).parse_fixture();
}

std::string serialize_dae(const DaeSystem& sys) {
    std::ostringstream os;
    for (const auto& [name, value] : sys.params())
        os << "param " << name << " = " << format_double(value) << ";\n";
    if (!sys.variables().empty()) {
        os << "var ";
        for (std::size_t i = 0; i < sys.variables().size(); ++i) {
            if (i) os << ", ";
            os << sys.variables()[i];
        }
        os << ";\n";
    }
    if (!sys.aux_vars().empty()) {
        os << "aux ";
        for (std::size_t i = 0; i < sys.aux_vars().size(); ++i) {
            if (i) os << ", ";
            os << sys.aux_vars()[i];
        }
        os << ";\n";
    }
    if (sys.base_point()) {
        const Point& p = *sys.base_point();
        os << "point { t = " << format_double(p.t) << ";";
        for (const auto& [slot, value] : p.values) {
            os << ' ';
            if (slot.order <= 3) {
                os << slot.name;
                for (int i = 0; i < slot.order; ++i) os << '\'';
            } else {
                os << "der(" << slot.name << ", " << slot.order << ')';
            }
            os << " = " << format_double(value) << ";";
        }
        os << " }\n";
    }
    for (const Expr& eq : sys.equations())
        os << "eq " << eq.to_string() << " = 0;\n";
    return os.str();
}

bool systems_structurally_equal(const DaeSystem& a, const DaeSystem& b) {
    if (a.variables() != b.variables() || a.aux_vars() != b.aux_vars())
        return false;
    if (a.params() != b.params()) return false;
    if (a.equation_count() != b.equation_count()) return false;
    for (std::size_t i = 0; i < a.equation_count(); ++i)
        if (!struct_equal(a.equation(i), b.equation(i))) return false;
    if (a.base_point().has_value() != b.base_point().has_value()) return false;
    if (a.base_point()) {
        if (a.base_point()->t != b.base_point()->t) return false;
        if (a.base_point()->values != b.base_point()->values) return false;
    }
    return true;
}

} // namespace daerelax
