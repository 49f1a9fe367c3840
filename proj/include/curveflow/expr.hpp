#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curveflow/error.hpp"
#include "curveflow/jet.hpp"

namespace curveflow {

enum class Var { U = 0, S = 1, T = 2 };

inline const char* to_string(Var v) noexcept {
    switch (v) {
    case Var::U: return "u";
    case Var::S: return "s";
    case Var::T: return "t";
    }
    return "?";
}

enum class Func { Sin, Cos, Sinh, Cosh, Exp, Sqrt };

inline const char* to_string(Func f) noexcept {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
    }
    return "?";
}

/// Set of variables a parse accepts, as a bitmask over Var.
struct VarSet {
    unsigned bits = 0;

    static constexpr VarSet all() { return {0b111u}; }
    static constexpr VarSet of(std::initializer_list<Var> vs) {
        VarSet s;
        for (Var v : vs) s.bits |= 1u << static_cast<unsigned>(v);
        return s;
    }
    constexpr bool contains(Var v) const { return (bits >> static_cast<unsigned>(v)) & 1u; }
    constexpr bool empty() const { return bits == 0; }
    friend constexpr bool operator==(VarSet, VarSet) = default;
};

/// Values bound to the free variables during evaluation.
struct Bindings {
    std::array<std::optional<double>, 3> values{};

    Bindings() = default;
    Bindings& set(Var v, double x) {
        values[static_cast<std::size_t>(v)] = x;
        return *this;
    }
    std::optional<double> get(Var v) const { return values[static_cast<std::size_t>(v)]; }
};

class Expr {
public:
    enum class Kind { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind() const noexcept { return node_->kind; }
    double literal() const noexcept { return node_->value; }
    Var variable() const noexcept { return node_->var; }
    Func func() const noexcept { return node_->func; }
    int exponent() const noexcept { return node_->exponent; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    static Expr make_literal(double v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Literal;
        n->value = v;
        return Expr(std::move(n));
    }
    static Expr make_variable(Var v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->var = v;
        return Expr(std::move(n));
    }
    static Expr make_unary(Kind k, Expr a) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(a.node_);
        return Expr(std::move(n));
    }
    static Expr make_binary(Kind k, Expr a, Expr b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(a.node_);
        n->rhs = std::move(b.node_);
        return Expr(std::move(n));
    }
    static Expr make_pow(Expr base, int exponent) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->lhs = std::move(base.node_);
        n->exponent = exponent;
        return Expr(std::move(n));
    }
    static Expr make_call(Func f, Expr arg) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Call;
        n->func = f;
        n->lhs = std::move(arg.node_);
        return Expr(std::move(n));
    }

    /// Structural equality; literals compare bitwise-equal as doubles.
    friend bool operator==(const Expr& a, const Expr& b) { return equal(a.node_.get(), b.node_.get()); }

    VarSet free_variables() const {
        VarSet s;
        collect(node_.get(), s);
        return s;
    }

private:
    struct Node {
        Kind kind = Kind::Literal;
        double value = 0.0;
        Var var = Var::U;
        Func func = Func::Sin;
        int exponent = 0;
        std::shared_ptr<const Node> lhs, rhs;
    };

    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static bool equal(const Node* a, const Node* b) {
        if (a == b) return true;
        if (!a || !b || a->kind != b->kind) return false;
        switch (a->kind) {
        case Kind::Literal: return a->value == b->value;
        case Kind::Variable: return a->var == b->var;
        case Kind::Neg: return equal(a->lhs.get(), b->lhs.get());
        case Kind::Pow: return a->exponent == b->exponent && equal(a->lhs.get(), b->lhs.get());
        case Kind::Call: return a->func == b->func && equal(a->lhs.get(), b->lhs.get());
        default: return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
        }
    }

    static void collect(const Node* n, VarSet& s) {
        if (!n) return;
        if (n->kind == Kind::Variable) s.bits |= 1u << static_cast<unsigned>(n->var);
        collect(n->lhs.get(), s);
        collect(n->rhs.get(), s);
    }

    std::shared_ptr<const Node> node_;
};

namespace detail {

inline double eval_scalar(const Expr& e, const Bindings& env) {
    using K = Expr::Kind;
    switch (e.kind()) {
    case K::Literal: return e.literal();
    case K::Variable: {
        auto v = env.get(e.variable());
        if (!v) throw UnboundVariable(to_string(e.variable()));
        return *v;
    }
    case K::Neg: return -eval_scalar(e.lhs(), env);
    case K::Add: return eval_scalar(e.lhs(), env) + eval_scalar(e.rhs(), env);
    case K::Sub: return eval_scalar(e.lhs(), env) - eval_scalar(e.rhs(), env);
    case K::Mul: return eval_scalar(e.lhs(), env) * eval_scalar(e.rhs(), env);
    case K::Div: {
        const double d = eval_scalar(e.rhs(), env);
        if (d == 0.0) throw DomainError("division by zero");
        return eval_scalar(e.lhs(), env) / d;
    }
    case K::Pow: {
        const double b = eval_scalar(e.lhs(), env);
        if (b == 0.0 && e.exponent() < 0) throw DomainError("division by zero in negative power");
        return std::pow(b, e.exponent());
    }
    case K::Call: {
        const double a = eval_scalar(e.lhs(), env);
        switch (e.func()) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Sinh: return std::sinh(a);
        case Func::Cosh: return std::cosh(a);
        case Func::Exp: return std::exp(a);
        case Func::Sqrt:
            if (a < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(a);
        }
    }
    }
    throw DomainError("malformed expression");
}

inline Jet eval_jet_rec(const Expr& e, Var var, const Jet& x, const Bindings& env) {
    using K = Expr::Kind;
    const std::size_t order = x.order();
    switch (e.kind()) {
    case K::Literal: return Jet::constant(order, e.literal());
    case K::Variable: {
        if (e.variable() == var) return x;
        auto v = env.get(e.variable());
        if (!v) throw UnboundVariable(to_string(e.variable()));
        return Jet::constant(order, *v);
    }
    case K::Neg: return -eval_jet_rec(e.lhs(), var, x, env);
    case K::Add: return eval_jet_rec(e.lhs(), var, x, env) + eval_jet_rec(e.rhs(), var, x, env);
    case K::Sub: return eval_jet_rec(e.lhs(), var, x, env) - eval_jet_rec(e.rhs(), var, x, env);
    case K::Mul: return eval_jet_rec(e.lhs(), var, x, env) * eval_jet_rec(e.rhs(), var, x, env);
    case K::Div: return eval_jet_rec(e.lhs(), var, x, env) / eval_jet_rec(e.rhs(), var, x, env);
    case K::Pow: return pow(eval_jet_rec(e.lhs(), var, x, env), e.exponent());
    case K::Call: {
        Jet a = eval_jet_rec(e.lhs(), var, x, env);
        switch (e.func()) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Sinh: return sinh(a);
        case Func::Cosh: return cosh(a);
        case Func::Exp: return exp(a);
        case Func::Sqrt: return sqrt(a);
        }
    }
    }
    throw DomainError("malformed expression");
}

class Parser {
public:
    Parser(std::string_view text, VarSet allowed) : text_(text), allowed_(allowed) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
        throw ParseError(at, msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                       text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = Expr::make_binary(Expr::Kind::Add, lhs, parse_product());
            else if (accept('-')) lhs = Expr::make_binary(Expr::Kind::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = Expr::make_binary(Expr::Kind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = Expr::make_binary(Expr::Kind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::make_unary(Expr::Kind::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    // power := primary ('^' exponent)?, exponent := ('-'|'+')* power
    // Right associative; the exponent must fold to a constant integer.
    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t at = pos_;
        Expr ex = parse_exponent();
        if (!ex.free_variables().empty()) fail_at(at, "exponent must be a constant integer");
        const double v = eval_scalar(ex, Bindings{});
        if (!std::isfinite(v) || v != std::round(v) || std::abs(v) > 1024.0)
            fail_at(at, "exponent must be an integer in [-1024, 1024]");
        return Expr::make_pow(base, static_cast<int>(v));
    }

    Expr parse_exponent() {
        if (accept('-')) return Expr::make_unary(Expr::Kind::Neg, parse_exponent());
        if (accept('+')) return parse_exponent();
        return parse_power();
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               ((text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && text_[p] >= '0' && text_[p] <= '9') {
                pos_ = p;
                while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
            }
        }
        double v = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail_at(start, "malformed number");
        return Expr::make_literal(v);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view id = text_.substr(start, pos_ - start);
        if (id == "pi") return Expr::make_literal(std::numbers::pi);
        static constexpr std::pair<std::string_view, Func> funcs[] = {
            {"sin", Func::Sin},   {"cos", Func::Cos}, {"sinh", Func::Sinh},
            {"cosh", Func::Cosh}, {"exp", Func::Exp}, {"sqrt", Func::Sqrt}};
        for (auto [name, f] : funcs) {
            if (id == name) {
                if (!accept('(')) fail("expected '(' after " + std::string(name));
                Expr arg = parse_sum();
                if (!accept(')')) fail("expected ')'");
                return Expr::make_call(f, arg);
            }
        }
        static constexpr std::pair<std::string_view, Var> vars[] = {
            {"u", Var::U}, {"s", Var::S}, {"t", Var::T}};
        for (auto [name, v] : vars) {
            if (id == name) {
                if (!allowed_.contains(v))
                    fail_at(start, "variable '" + std::string(name) + "' is not allowed here");
                return Expr::make_variable(v);
            }
        }
        fail_at(start, "unknown identifier '" + std::string(id) + "'");
    }

    std::string_view text_;
    VarSet allowed_;
    std::size_t pos_ = 0;
};

inline void print_rec(const Expr& e, std::string& out) {
    using K = Expr::Kind;
    switch (e.kind()) {
    case K::Literal: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", e.literal());
        out += buf;
        return;
    }
    case K::Variable: out += to_string(e.variable()); return;
    case K::Neg:
        out += "(-";
        print_rec(e.lhs(), out);
        out += ')';
        return;
    case K::Pow:
        out += '(';
        print_rec(e.lhs(), out);
        out += " ^ " + std::to_string(e.exponent()) + ')';
        return;
    case K::Call:
        out += to_string(e.func());
        out += '(';
        print_rec(e.lhs(), out);
        out += ')';
        return;
    default: {
        const char* op = e.kind() == K::Add ? " + " : e.kind() == K::Sub ? " - "
                       : e.kind() == K::Mul ? " * " : " / ";
        out += '(';
        print_rec(e.lhs(), out);
        out += op;
        print_rec(e.rhs(), out);
        out += ')';
        return;
    }
    }
}

} // namespace detail

/// Parses the curve/flow expression language. Grammar is in docs/expressions.md.
inline Expr parse(std::string_view text, VarSet allowed = VarSet::all()) {
    return detail::Parser(text, allowed).parse();
}

/// Fully parenthesised rendering that parses back to the same tree.
inline std::string print(const Expr& e) {
    std::string out;
    detail::print_rec(e, out);
    return out;
}

inline double eval(const Expr& e, const Bindings& env) { return detail::eval_scalar(e, env); }

/// Taylor coefficients of e in `var` at `point`, up to `order`.
inline Jet eval_jet(const Expr& e, Var var, double point, std::size_t order,
                    const Bindings& env = {}) {
    return detail::eval_jet_rec(e, var, Jet::variable(order, point), env);
}

} // namespace curveflow
