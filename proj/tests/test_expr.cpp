#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fractop/expr.hpp"

using namespace fractop;

namespace {

Point pt(double x) { return Eigen::VectorXd::Constant(1, x); }

Box interval(double lo, double hi) { return {pt(lo), pt(hi)}; }

double eval1(const expr::Expr& e, double x) { return expr::eval(e, pt(x)); }

}  // namespace

TEST_CASE("parse and evaluate") {
    CHECK(eval1(expr::parse("x", 1), 0.7) == 0.7);
    CHECK(eval1(expr::parse("2*x^2 - 3*x + 1", 1), 2.0) == doctest::Approx(3.0));
    CHECK(eval1(expr::parse("cos(pi*x)", 1), 1.0) == doctest::Approx(-1.0));
    CHECK(eval1(expr::parse("exp(-x)", 1), 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(eval1(expr::parse("abs(x - 0.5)", 1), 0.2) == doctest::Approx(0.3));
    CHECK(eval1(expr::parse("sin(x)^2 + cos(x)^2", 1), 0.37) == doctest::Approx(1.0));
    CHECK(eval1(expr::parse("-x^2", 1), 2.0) == doctest::Approx(4.0));  // unary minus binds tighter than ^
    CHECK(eval1(expr::parse("-(x^2)", 1), 2.0) == doctest::Approx(-4.0));
    CHECK(eval1(expr::parse("1e-2 + .5", 1), 0.0) == doctest::Approx(0.51));

    const expr::Expr e2 = expr::parse("x0*x1 + x1^3", 2);
    Point p(2);
    p << 2.0, 3.0;
    CHECK(expr::eval(e2, p) == doctest::Approx(33.0));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(expr::parse("x +", 1), SyntaxError);
    CHECK_THROWS_AS(expr::parse("x2", 2), SyntaxError);  // variables are x0..x{dim-1}
    CHECK_THROWS_AS(expr::parse("y", 1), SyntaxError);
    CHECK_THROWS_AS(expr::parse("cos x", 1), SyntaxError);
    CHECK_THROWS_AS(expr::parse("x^(2)", 1), SyntaxError);  // exponents are integer literals
    CHECK_THROWS_AS(expr::parse("x^-1", 1), SyntaxError);
    try {
        expr::parse("x + $", 1);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("derivative matches finite differences") {
    const std::vector<std::string> exprs = {
        "x^3 - 2*x", "cos(3*x)", "exp(x)*sin(x)", "abs(x - 0.5)", "x*cos(x^2)",
        "(x + 1)*(x - 1)"};
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    const double h = 1e-6;
    for (const auto& text : exprs) {
        const expr::Expr e = expr::parse(text, 1);
        const expr::Expr d = expr::derivative(e, 0);
        for (int trial = 0; trial < 50; ++trial) {
            double x = unif(gen);
            if (std::abs(x - 0.5) < 10 * h) x += 0.01;  // keep away from the abs kink
            const double fd = (eval1(e, x + h) - eval1(e, x - h)) / (2 * h);
            CHECK(eval1(d, x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("interval evaluation encloses the range") {
    const expr::Interval c = expr::eval_interval(expr::parse("cos(x)", 1),
                                                 interval(0.0, 10.0));
    CHECK(c.lo == -1.0);  // interior minimum at pi
    CHECK(c.hi == 1.0);   // interior maximum at 2*pi

    const expr::Interval s = expr::eval_interval(expr::parse("sin(x)", 1),
                                                 interval(0.1, 1.0));
    CHECK(s.lo == doctest::Approx(std::sin(0.1)));  // monotone piece: endpoint values
    CHECK(s.hi == doctest::Approx(std::sin(1.0)));

    const expr::Interval sq = expr::eval_interval(expr::parse("x^2", 1),
                                                  interval(-1.0, 2.0));
    CHECK(sq.lo == 0.0);  // even power clamps at zero across a sign change
    CHECK(sq.hi == 4.0);

    const expr::Interval ab = expr::eval_interval(expr::parse("abs(x)", 1),
                                                  interval(-3.0, 1.0));
    CHECK(ab.lo == 0.0);
    CHECK(ab.hi == 3.0);
}

TEST_CASE("property: interval enclosure contains sampled values") {
    const std::vector<std::string> exprs = {
        "x^3 - 2*x", "cos(5*x)", "exp(x) - x^2", "abs(x - 0.3)*sin(x)", "(1 - x)^4"};
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> unif(-1.0, 2.0);
    for (const auto& text : exprs) {
        const expr::Expr e = expr::parse(text, 1);
        const expr::Interval range = expr::eval_interval(e, interval(-1.0, 2.0));
        for (int trial = 0; trial < 500; ++trial) {
            const double v = eval1(e, unif(gen));
            CHECK(v >= range.lo - 1e-12);
            CHECK(v <= range.hi + 1e-12);
        }
    }
}

TEST_CASE("lipschitz_bound on known examples") {
    const Box unit = interval(0.0, 1.0);
    CHECK(expr::lipschitz_bound(expr::parse("x", 1), unit) == 1.0);
    CHECK(expr::lipschitz_bound(expr::parse("3*x + 7", 1), unit) == 3.0);
    CHECK(expr::lipschitz_bound(expr::parse("sin(5*x)", 1), unit) == 5.0);
    CHECK(expr::lipschitz_bound(expr::parse("x^2", 1), unit) == doctest::Approx(2.0));
    CHECK(expr::lipschitz_bound(expr::parse("abs(x - 0.5)", 1), unit) == 1.0);

    Box square{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
    // grad(x0 + 2*x1) = (1, 2), norm sqrt(5)
    CHECK(expr::lipschitz_bound(expr::parse("x0 + 2*x1", 2), square) ==
          doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("property: lipschitz_bound dominates difference quotients") {
    const std::vector<std::string> exprs = {
        "x^3 - 2*x", "cos(5*x)", "exp(x)*sin(3*x)", "abs(x - 0.3)", "(1 - x)^4 + x"};
    const Box box = interval(0.0, 1.0);
    std::mt19937_64 gen(47);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& text : exprs) {
        const expr::Expr e = expr::parse(text, 1);
        const double L = expr::lipschitz_bound(e, box);
        for (int trial = 0; trial < 500; ++trial) {
            const double x = unif(gen);
            const double y = unif(gen);
            if (std::abs(x - y) < 1e-9) continue;
            const double quotient = std::abs(eval1(e, x) - eval1(e, y)) / std::abs(x - y);
            CHECK(quotient <= L * (1 + 1e-6));
        }
    }
}

TEST_CASE("to_function_spec wires evaluation and certified continuity") {
    const Box box = interval(0.0, 1.0);
    const ContinuousFunctionSpec spec =
        expr::to_function_spec(expr::parse("cos(3*x)", 1), box);
    CHECK(spec.eval(pt(0.5)) == doctest::Approx(std::cos(1.5)));
    REQUIRE(spec.lipschitz.has_value());
    CHECK(*spec.lipschitz == 3.0);  // sup |3*sin(3x)| on [0, 1] hits 3 at 3x = pi/2
}
