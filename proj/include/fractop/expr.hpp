#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fractop/approx.hpp"
#include "fractop/errors.hpp"
#include "fractop/geometry.hpp"

namespace fractop::expr {

/// Closed interval for range enclosure.
struct Interval {
    double lo, hi;

    static Interval point(double x) { return {x, x}; }

    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator*(Interval a, Interval b) {
    const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {std::min({p[0], p[1], p[2], p[3]}), std::max({p[0], p[1], p[2], p[3]})};
}

namespace detail {

/// Does [a, b] contain offset + k*period for some integer k?
inline bool contains_grid(double a, double b, double offset, double period) {
    return std::floor((b - offset) / period) >= std::ceil((a - offset) / period);
}

}  // namespace detail

inline Interval cos(Interval x) {
    const double pi = std::acos(-1.0);
    double hi = std::max(std::cos(x.lo), std::cos(x.hi));
    double lo = std::min(std::cos(x.lo), std::cos(x.hi));
    if (detail::contains_grid(x.lo, x.hi, 0.0, 2 * pi)) hi = 1.0;
    if (detail::contains_grid(x.lo, x.hi, pi, 2 * pi)) lo = -1.0;
    return {lo, hi};
}

inline Interval sin(Interval x) {
    const double pi = std::acos(-1.0);
    double hi = std::max(std::sin(x.lo), std::sin(x.hi));
    double lo = std::min(std::sin(x.lo), std::sin(x.hi));
    if (detail::contains_grid(x.lo, x.hi, pi / 2, 2 * pi)) hi = 1.0;
    if (detail::contains_grid(x.lo, x.hi, -pi / 2, 2 * pi)) lo = -1.0;
    return {lo, hi};
}

inline Interval exp(Interval x) { return {std::exp(x.lo), std::exp(x.hi)}; }

inline Interval abs(Interval x) {
    if (x.lo >= 0) return x;
    if (x.hi <= 0) return -x;
    return {0.0, std::max(-x.lo, x.hi)};
}

inline Interval pow(Interval x, int e) {
    Interval acc = Interval::point(1.0);
    for (int i = 0; i < e; ++i) acc = acc * x;
    if (e >= 2 && e % 2 == 0 && x.lo < 0 && x.hi > 0) acc.lo = 0.0;
    return acc;
}

/// AST for the config function grammar: polynomials, cos, sin, exp, abs over
/// variables x (1-d) or x0..x9.
struct Node {
    enum class Kind { constant, var, add, sub, mul, neg, pow, cos, sin, exp, abs, sign };
    Kind kind;
    double value = 0.0;  // constant
    int index = 0;       // var index or pow exponent
    std::shared_ptr<const Node> a, b;
};

using Expr = std::shared_ptr<const Node>;

inline Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }
inline Expr constant(double v) { return make({Node::Kind::constant, v, 0, {}, {}}); }

inline double eval(const Expr& e, const Point& x) {
    switch (e->kind) {
        case Node::Kind::constant: return e->value;
        case Node::Kind::var: return x[e->index];
        case Node::Kind::add: return eval(e->a, x) + eval(e->b, x);
        case Node::Kind::sub: return eval(e->a, x) - eval(e->b, x);
        case Node::Kind::mul: return eval(e->a, x) * eval(e->b, x);
        case Node::Kind::neg: return -eval(e->a, x);
        case Node::Kind::pow: return std::pow(eval(e->a, x), e->index);
        case Node::Kind::cos: return std::cos(eval(e->a, x));
        case Node::Kind::sin: return std::sin(eval(e->a, x));
        case Node::Kind::exp: return std::exp(eval(e->a, x));
        case Node::Kind::abs: return std::abs(eval(e->a, x));
        case Node::Kind::sign: {
            const double v = eval(e->a, x);
            return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
        }
    }
    throw Error("unreachable expression kind");
}

inline Interval eval_interval(const Expr& e, const Box& box) {
    switch (e->kind) {
        case Node::Kind::constant: return Interval::point(e->value);
        case Node::Kind::var: return {box.lo[e->index], box.hi[e->index]};
        case Node::Kind::add: return eval_interval(e->a, box) + eval_interval(e->b, box);
        case Node::Kind::sub: return eval_interval(e->a, box) - eval_interval(e->b, box);
        case Node::Kind::mul: return eval_interval(e->a, box) * eval_interval(e->b, box);
        case Node::Kind::neg: return -eval_interval(e->a, box);
        case Node::Kind::pow: return pow(eval_interval(e->a, box), e->index);
        case Node::Kind::cos: return cos(eval_interval(e->a, box));
        case Node::Kind::sin: return sin(eval_interval(e->a, box));
        case Node::Kind::exp: return exp(eval_interval(e->a, box));
        case Node::Kind::abs: return abs(eval_interval(e->a, box));
        case Node::Kind::sign: {
            const Interval v = eval_interval(e->a, box);
            if (v.lo > 0) return Interval::point(1.0);
            if (v.hi < 0) return Interval::point(-1.0);
            return {-1.0, 1.0};
        }
    }
    throw Error("unreachable expression kind");
}

/// Symbolic partial derivative d/dx_i. abs differentiates to sign(u) * u',
/// valid a.e. and enough for an interval Lipschitz bound.
inline Expr derivative(const Expr& e, int var) {
    using K = Node::Kind;
    switch (e->kind) {
        case K::constant: return constant(0.0);
        case K::var: return constant(e->index == var ? 1.0 : 0.0);
        case K::add: return make({K::add, 0, 0, derivative(e->a, var), derivative(e->b, var)});
        case K::sub: return make({K::sub, 0, 0, derivative(e->a, var), derivative(e->b, var)});
        case K::mul:
            return make({K::add, 0, 0,
                         make({K::mul, 0, 0, derivative(e->a, var), e->b}),
                         make({K::mul, 0, 0, e->a, derivative(e->b, var)})});
        case K::neg: return make({K::neg, 0, 0, derivative(e->a, var), {}});
        case K::pow:
            if (e->index == 0) return constant(0.0);
            return make({K::mul, 0, 0, constant(e->index),
                         make({K::mul, 0, 0, make({K::pow, 0, e->index - 1, e->a, {}}),
                               derivative(e->a, var)})});
        case K::cos:
            return make({K::neg, 0, 0,
                         make({K::mul, 0, 0, make({K::sin, 0, 0, e->a, {}}),
                               derivative(e->a, var)}),
                         {}});
        case K::sin:
            return make({K::mul, 0, 0, make({K::cos, 0, 0, e->a, {}}), derivative(e->a, var)});
        case K::exp:
            return make({K::mul, 0, 0, make({K::exp, 0, 0, e->a, {}}), derivative(e->a, var)});
        case K::abs:
            return make({K::mul, 0, 0, make({K::sign, 0, 0, e->a, {}}), derivative(e->a, var)});
        case K::sign: return constant(0.0);  // a.e.; jumps are handled by abs's own bound
    }
    throw Error("unreachable expression kind");
}

/// Certified Lipschitz bound on the box: sqrt(sum_i sup|d_i a|^2) via
/// interval evaluation of the gradient.
inline double lipschitz_bound(const Expr& e, const Box& box) {
    double sum = 0.0;
    for (int i = 0; i < box.dim(); ++i) {
        const double m = eval_interval(derivative(e, i), box).mag();
        sum += m * m;
    }
    return std::sqrt(sum);
}

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr acc = parse_term();
        for (;;) {
            if (eat('+')) {
                acc = make({Node::Kind::add, 0, 0, acc, parse_term()});
            } else if (eat('-')) {
                acc = make({Node::Kind::sub, 0, 0, acc, parse_term()});
            } else {
                return acc;
            }
        }
    }

    Expr parse_term() {
        Expr acc = parse_power();
        while (eat('*')) acc = make({Node::Kind::mul, 0, 0, acc, parse_power()});
        return acc;
    }

    Expr parse_power() {
        Expr base = parse_unary();
        if (eat('^')) {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start) throw SyntaxError("expected nonnegative integer exponent", pos_);
            const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
            return make({Node::Kind::pow, 0, e, base, {}});
        }
        return base;
    }

    Expr parse_unary() {
        if (eat('-')) return make({Node::Kind::neg, 0, 0, parse_unary(), {}});
        return parse_primary();
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            return constant(std::stod(std::string(text_.substr(start, pos_ - start))));
        } catch (const std::exception&) {
            throw SyntaxError("malformed number literal", start);
        }
    }

    Expr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalnum(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "x" && dim_ == 1) return make({Node::Kind::var, 0, 0, {}, {}});
        if (name.size() >= 2 && name[0] == 'x') {
            const int idx = std::stoi(name.substr(1));
            if (idx < 0 || idx >= dim_)
                throw SyntaxError("variable " + name + " out of range for dimension " +
                                      std::to_string(dim_),
                                  start);
            return make({Node::Kind::var, 0, idx, {}, {}});
        }
        if (name == "pi") return constant(std::acos(-1.0));
        for (auto [fname, kind] : {std::pair{"cos", Node::Kind::cos},
                                   std::pair{"sin", Node::Kind::sin},
                                   std::pair{"exp", Node::Kind::exp},
                                   std::pair{"abs", Node::Kind::abs}}) {
            if (name == fname) {
                if (!eat('(')) throw SyntaxError("expected '(' after " + name, pos_);
                Expr arg = parse_sum();
                if (!eat(')')) throw SyntaxError("expected ')'", pos_);
                return make({kind, 0, 0, arg, {}});
            }
        }
        throw SyntaxError("unknown identifier '" + name + "'", start);
    }

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text, int dim) {
    return detail::ExprParser(text, dim).parse();
}

/// Package an expression as a multiplier with its auto-derived Lipschitz
/// constant on the given box.
inline ContinuousFunctionSpec to_function_spec(const Expr& e, const Box& box) {
    ContinuousFunctionSpec spec;
    spec.eval = [e](const Point& x) { return eval(e, x); };
    spec.lipschitz = lipschitz_bound(e, box);
    return spec;
}

}  // namespace fractop::expr
