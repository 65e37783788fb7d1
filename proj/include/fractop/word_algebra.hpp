#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fractop/errors.hpp"
#include "fractop/ifs.hpp"
#include "fractop/leveled.hpp"

namespace fractop {

/// One monomial coeff * S_alpha S_beta* of the dense *-subalgebra of O_n.
struct CuntzTerm {
    Complex coeff;
    Word alpha;
    Word beta;
};

inline constexpr double kCoeffPruneTol = 1e-14;

namespace detail {

inline std::tuple<std::size_t, const Word&, std::size_t, const Word&> term_key(
    const CuntzTerm& t) {
    return {t.alpha.size(), t.alpha, t.beta.size(), t.beta};
}

inline bool is_prefix(const Word& p, const Word& w) {
    return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

inline Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Word suffix_after(const Word& w, std::size_t len) {
    return Word(w.begin() + static_cast<std::ptrdiff_t>(len), w.end());
}

}  // namespace detail

/// Linear combination of words S_alpha S_beta*, kept in normal form: pairwise
/// distinct (alpha, beta) sorted by (|alpha|, alpha, |beta|, beta), zero
/// coefficients pruned.
class CuntzPolynomial {
public:
    CuntzPolynomial() = default;
    explicit CuntzPolynomial(int n) : n_(n) {}

    CuntzPolynomial(int n, std::vector<CuntzTerm> terms) : n_(n) {
        for (auto& t : terms) accumulate(std::move(t));
        normalize();
    }

    static CuntzPolynomial zero(int n) { return CuntzPolynomial(n); }

    static CuntzPolynomial unit(int n) {
        return CuntzPolynomial(n, {CuntzTerm{Complex{1.0, 0.0}, {}, {}}});
    }

    static CuntzPolynomial monomial(int n, Complex c, Word alpha, Word beta) {
        for (int l : alpha)
            if (l < 1 || l > n) throw GeneratorOutOfRange("generator index out of range");
        for (int l : beta)
            if (l < 1 || l > n) throw GeneratorOutOfRange("generator index out of range");
        return CuntzPolynomial(n, {CuntzTerm{c, std::move(alpha), std::move(beta)}});
    }

    int n() const { return n_; }
    const std::vector<CuntzTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Length of the longest alpha/beta word across terms.
    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto& t : terms_) d = std::max({d, t.alpha.size(), t.beta.size()});
        return d;
    }

    friend CuntzPolynomial operator+(const CuntzPolynomial& p, const CuntzPolynomial& q) {
        CuntzPolynomial out(std::max(p.n_, q.n_));
        for (const auto& t : p.terms_) out.accumulate(t);
        for (const auto& t : q.terms_) out.accumulate(t);
        out.normalize();
        return out;
    }

    friend CuntzPolynomial operator-(const CuntzPolynomial& p, const CuntzPolynomial& q) {
        return p + (q * Complex{-1.0, 0.0});
    }

    friend CuntzPolynomial operator*(const CuntzPolynomial& p, Complex c) {
        CuntzPolynomial out = p;
        for (auto& t : out.terms_) t.coeff *= c;
        out.normalize();
        return out;
    }

private:
    friend CuntzPolynomial wa_multiply(const CuntzPolynomial&, const CuntzPolynomial&);
    friend CuntzPolynomial wa_adjoint(const CuntzPolynomial&);
    friend CuntzPolynomial wa_collapse(const CuntzPolynomial&);

    void accumulate(CuntzTerm t) { terms_.push_back(std::move(t)); }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const CuntzTerm& a, const CuntzTerm& b) {
            return detail::term_key(a) < detail::term_key(b);
        });
        std::vector<CuntzTerm> out;
        for (auto& t : terms_) {
            if (!out.empty() && detail::term_key(out.back()) == detail::term_key(t)) {
                out.back().coeff += t.coeff;
            } else {
                out.push_back(std::move(t));
            }
        }
        std::erase_if(out, [](const CuntzTerm& t) { return std::abs(t.coeff) < kCoeffPruneTol; });
        terms_ = std::move(out);
    }

    int n_ = 2;
    std::vector<CuntzTerm> terms_;
};

/// Product in normal form. The cross factor S_beta* S_alpha' rewrites to
/// S_{alpha' minus beta} if beta is a prefix of alpha', to S_{beta minus
/// alpha'}* if alpha' is a prefix of beta, and to 0 otherwise.
inline CuntzPolynomial wa_multiply(const CuntzPolynomial& p, const CuntzPolynomial& q) {
    CuntzPolynomial out(std::max(p.n(), q.n()));
    for (const auto& s : p.terms()) {
        for (const auto& t : q.terms()) {
            const Complex c = s.coeff * t.coeff;
            if (detail::is_prefix(s.beta, t.alpha)) {
                out.accumulate(CuntzTerm{
                    c, detail::concat(s.alpha, detail::suffix_after(t.alpha, s.beta.size())),
                    t.beta});
            } else if (detail::is_prefix(t.alpha, s.beta)) {
                out.accumulate(CuntzTerm{
                    c, s.alpha,
                    detail::concat(t.beta, detail::suffix_after(s.beta, t.alpha.size()))});
            }
            // incompatible prefixes: S_beta* S_alpha' = 0
        }
    }
    out.normalize();
    return out;
}

/// *-operation: (c S_alpha S_beta*)* = conj(c) S_beta S_alpha*.
inline CuntzPolynomial wa_adjoint(const CuntzPolynomial& p) {
    CuntzPolynomial out(p.n());
    for (const auto& t : p.terms())
        out.accumulate(CuntzTerm{std::conj(t.coeff), t.beta, t.alpha});
    out.normalize();
    return out;
}

/// Optional simplification using sum_j S_j S_j* = 1: whenever all n children
/// {c S_{aj} S_{bj}*}_j of a common parent pair (a, b) appear with the same
/// coefficient, they collapse to c S_a S_b*. Repeated to a fixed point. Not
/// part of normalization (it would break normal-form uniqueness).
inline CuntzPolynomial wa_collapse(const CuntzPolynomial& p) {
    CuntzPolynomial cur = p;
    for (;;) {
        std::map<std::pair<Word, Word>, std::map<int, Complex>> families;
        for (const auto& t : cur.terms()) {
            if (t.alpha.empty() || t.beta.empty() || t.alpha.back() != t.beta.back()) continue;
            Word a(t.alpha.begin(), t.alpha.end() - 1);
            Word b(t.beta.begin(), t.beta.end() - 1);
            families[{std::move(a), std::move(b)}][t.alpha.back()] = t.coeff;
        }
        bool changed = false;
        CuntzPolynomial next(cur.n());
        for (auto& [parent, children] : families) {
            if (static_cast<int>(children.size()) != cur.n()) continue;
            const Complex c = children.begin()->second;
            bool uniform = true;
            for (const auto& [letter, coeff] : children)
                if (std::abs(coeff - c) > kCoeffPruneTol) uniform = false;
            if (!uniform) continue;
            // replace the n children by the parent
            for (const auto& [letter, coeff] : children) {
                Word a = parent.first;
                a.push_back(letter);
                Word b = parent.second;
                b.push_back(letter);
                next.accumulate(CuntzTerm{-coeff, std::move(a), std::move(b)});
            }
            next.accumulate(CuntzTerm{c, parent.first, parent.second});
            changed = true;
        }
        if (!changed) return cur;
        for (const auto& t : cur.terms()) next.accumulate(t);
        next.normalize();
        cur = std::move(next);
    }
}

/// Evaluate p on a leveled vector: S_i acts as apply_isometry, S_i* as
/// apply_coisometry. v is refined as needed so that every beta fits; term
/// outputs at mixed levels are refined to a common level before summing.
inline LeveledVector wa_apply(const CuntzPolynomial& p, const LeveledVector& v,
                              bool allow_refine = true) {
    std::size_t max_beta = 0;
    int max_out_level = 0;
    for (const auto& t : p.terms()) {
        max_beta = std::max(max_beta, t.beta.size());
        const int out = std::max(static_cast<int>(v.level), static_cast<int>(t.beta.size())) -
                        static_cast<int>(t.beta.size()) + static_cast<int>(t.alpha.size());
        max_out_level = std::max(max_out_level, out);
    }
    if (static_cast<std::size_t>(v.level) < max_beta && !allow_refine)
        throw InsufficientLevel("vector level is below the deepest beta word");
    max_out_level = std::max(max_out_level, v.level);

    LeveledVector acc = LeveledVector::zero(v.n, max_out_level);
    for (const auto& t : p.terms()) {
        LeveledVector w = v;
        if (w.level < static_cast<int>(t.beta.size()))
            w = refine(w, static_cast<int>(t.beta.size()) - w.level);
        for (int letter : t.beta) w = apply_coisometry(letter, w, false);
        for (auto it = t.alpha.rbegin(); it != t.alpha.rend(); ++it)
            w = apply_isometry(*it, w);
        w = refine(w, max_out_level - w.level);
        acc.coeffs += t.coeff * w.coeffs;
    }
    return acc;
}

namespace detail {

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

/// Canonical text form, round-trippable through parse().
inline std::string to_string(const CuntzPolynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
        const CuntzTerm& t = p.terms()[i];
        if (i) out += " + ";
        out += "(" + detail::format_real(t.coeff.real());
        if (t.coeff.imag() >= 0) out += "+";
        out += detail::format_real(t.coeff.imag()) + "·i)";
        for (int l : t.alpha) out += "·S" + std::to_string(l);
        for (auto it = t.beta.rbegin(); it != t.beta.rend(); ++it)
            out += "·S" + std::to_string(*it) + "*";
    }
    return out;
}

namespace detail {

/// Recursive-descent parser for the polynomial grammar: complex literals,
/// generators S1..Sn, postfix adjoint *, operators + - and the middle dot
/// for products, parentheses.
class PolyParser {
public:
    PolyParser(std::string_view text, int n) : text_(text), n_(n) {}

    CuntzPolynomial parse() {
        CuntzPolynomial p = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    CuntzPolynomial parse_sum() {
        CuntzPolynomial acc = parse_product();
        for (;;) {
            if (eat("+")) {
                acc = acc + parse_product();
            } else if (eat("-")) {
                acc = acc - parse_product();
            } else {
                return acc;
            }
        }
    }

    CuntzPolynomial parse_product() {
        CuntzPolynomial acc = parse_factor();
        while (eat("·")) acc = wa_multiply(acc, parse_factor());
        return acc;
    }

    CuntzPolynomial parse_factor() {
        skip_ws();
        bool negate = false;
        while (eat("-")) negate = !negate;
        CuntzPolynomial p = parse_primary();
        while (eat("*")) p = wa_adjoint(p);
        return negate ? p * Complex{-1.0, 0.0} : p;
    }

    CuntzPolynomial parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            CuntzPolynomial p = parse_sum();
            if (!eat(")")) throw SyntaxError("expected ')'", pos_);
            return p;
        }
        if (c == 'i') {
            ++pos_;
            return CuntzPolynomial::unit(n_) * Complex{0.0, 1.0};
        }
        if (c == 'S') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start) throw SyntaxError("expected generator index after 'S'", pos_);
            const int idx = std::stoi(std::string(text_.substr(start, pos_ - start)));
            if (idx < 1 || idx > n_)
                throw GeneratorOutOfRange("generator S" + std::to_string(idx) +
                                          " out of range for n = " + std::to_string(n_));
            return CuntzPolynomial::monomial(n_, Complex{1.0, 0.0}, Word{idx}, Word{});
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                ++pos_;
            try {
                const double val = std::stod(std::string(text_.substr(start, pos_ - start)));
                return CuntzPolynomial::unit(n_) * Complex{val, 0.0};
            } catch (const std::exception&) {
                throw SyntaxError("malformed number literal", start);
            }
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline CuntzPolynomial parse(std::string_view expr, int n) {
    return detail::PolyParser(expr, n).parse();
}

}  // namespace fractop
