#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace pwvie;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using LP = LogPowerPolynomial<Rational>;

LP term(int order, int j, int k, Rational c) { return LP::monomial(order, j, k, std::move(c)); }

}  // namespace

TEST_CASE("addition and scaling") {
    CHECK((term(4, 1, 1, 1) + term(4, 1, 1, -1)).is_zero());
    CHECK(scale(term(4, 2, 0, 1), Rational(3)) == term(4, 2, 0, 3));
    const auto sum = LP::from_polynomial(Polynomial<Rational>({1, 1}), 4) + term(4, 1, 1, 1);
    CHECK(sum.terms().size() == 3);
    CHECK(sum.coeff(0, 0) == 1);
    CHECK(sum.coeff(1, 0) == 1);
    CHECK(sum.coeff(1, 1) == 1);
}

TEST_CASE("multiplication truncates at the order") {
    CHECK(multiply(term(4, 1, 1, 1), term(4, 1, 1, 1)) == term(4, 2, 2, 1));
    const auto p = term(4, 1, 1, 2) + term(4, 0, 3, -1);
    CHECK(multiply(p, term(4, 0, 0, 1)) == p);
    const auto a = LP::from_polynomial(Polynomial<Rational>({1, 1}), 1);
    const auto b = LP::from_polynomial(Polynomial<Rational>({1, -1}), 1);
    CHECK(multiply(a, b) == term(1, 0, 0, 1));
}

TEST_CASE("boundary substitution") {
    const BoundaryFunction half({Rational(1, 2)});
    const auto lnt = substitute_boundary(LogPowerPolynomial<double>::monomial(3, 0, 1, 1.0), half, 3);
    CHECK(lnt.coeff(0, 1) == 1.0);
    CHECK_THAT(lnt.coeff(0, 0), WithinAbs(-std::log(2.0), 1e-15));
    CHECK(substitute_boundary(term(3, 1, 0, 1), half, 3) == term(3, 1, 0, Rational(1, 2)));

    // Nonlinear boundary: compare with direct evaluation of p(alpha(t)).
    const BoundaryFunction bent({Rational(1, 2), 1});
    const auto p = LogPowerPolynomial<double>::monomial(2, 1, 1, 1.0);
    const auto sub = substitute_boundary(p, bent, 2);
    for (double t : {1e-3, 1e-4}) {
        const double a = t / 2 + t * t;
        CHECK(std::abs(sub.evaluate(t) - p.evaluate(a)) <= 10 * std::pow(t, 3) * std::pow(std::log(t), 2));
    }
}

TEST_CASE("integration from zero") {
    CHECK(integrate_from_zero(term(4, 0, 0, 1)) == term(4, 1, 0, 1));
    CHECK(integrate_from_zero(term(4, 0, 1, 1)) == term(4, 1, 1, 1) + term(4, 1, 0, -1));
    const auto r = integrate_from_zero(term(4, 1, 2, 1));
    CHECK(r == term(4, 2, 2, Rational(1, 2)) + term(4, 2, 1, Rational(-1, 2)) + term(4, 2, 0, Rational(1, 4)));
    CHECK(differentiate(r) == term(4, 1, 2, 1));
}

TEST_CASE("differentiation") {
    CHECK(differentiate(term(4, 1, 1, 1) + term(4, 1, 0, -1)) == term(4, 0, 1, 1));
    CHECK(differentiate(term(4, 2, 0, 1)) == term(4, 1, 0, 2));
    CHECK_THROWS_AS(differentiate(term(4, 0, 1, 1)), Error);
}

TEST_CASE("evaluation") {
    CHECK_THAT(LogPowerPolynomial<double>::monomial(2, 0, 1, 1.0).evaluate(std::exp(-1.0)), WithinAbs(-1, 1e-15));
    CHECK(term(2, 0, 0, Rational(2, 3)).evaluate(0.37) == 2.0 / 3.0);
    CHECK_THAT(LogPowerPolynomial<double>::monomial(2, 0, 1, -1 / std::log(2.0)).evaluate(0.25), WithinRel(2.0, 1e-15));
}

TEST_CASE("ring laws on random log-power polynomials") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const auto a = test::random_logpower(rng, 5), b = test::random_logpower(rng, 5), c = test::random_logpower(rng, 5);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
        CHECK(multiply(a, b) == multiply(b, a));
        CHECK(multiply(a, b + c) == multiply(a, b) + multiply(a, c));
    }
}

TEST_CASE("truncation commutes with the ring operations") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 200; ++i) {
        const auto a = test::random_logpower(rng, 6), b = test::random_logpower(rng, 6);
        CHECK((a + b).with_order(3) == a.with_order(3) + b.with_order(3));
        CHECK(multiply(a, b).with_order(3) == multiply(a.with_order(3), b.with_order(3)));
    }
}

TEST_CASE("integrate then differentiate is the identity") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const auto p = test::random_logpower(rng, 5).with_order(6);
        CHECK(differentiate(integrate_from_zero(p)) == p);
    }
}

TEST_CASE("integration identity against quadrature") {
    std::mt19937_64 rng(24);
    std::uniform_int_distribution<int> J(0, 4), K(0, 3);
    for (int i = 0; i < 200; ++i) {
        const int j = J(rng), k = K(rng);
        const auto anti = integrate_from_zero(term(8, j, k, 1));
        // Exact check: derivative of the antiderivative.
        CHECK(differentiate(anti) == term(8, j, k, 1));
        // Value check: int_0^1/2 t^j ln^k t dt.
        auto f = [&](double t) { return std::pow(t, j) * std::pow(std::log(t), k); };
        CHECK_THAT(anti.evaluate(0.5), WithinAbs(adaptive_simpson_from_zero<double>(f, 0.5, 1e-13), 1e-9));
    }
}

TEST_CASE("linear substitution is exact") {
    std::mt19937_64 rng(25);
    std::uniform_int_distribution<int> num(1, 9);
    for (int i = 0; i < 200; ++i) {
        const auto p = test::random_logpower(rng, 4);
        const int q = num(rng) + 1;
        const Rational beta(std::uniform_int_distribution<int>(1, q - 1)(rng), q);
        LogPowerPolynomial<double> pd(4);
        for (const auto& [key, c] : p.terms()) pd.add_term(key.first, key.second, c.convert_to<double>());
        const auto sub = substitute_boundary(pd, BoundaryFunction({beta}), 4);
        const double t = 0.3, a = beta.convert_to<double>() * t;
        CHECK_THAT(sub.evaluate(t), WithinAbs(pd.evaluate(a), 1e-11 * (1 + std::abs(pd.evaluate(a)))));
    }
}

TEST_CASE("nonlinear substitution converges at the expected order") {
    const BoundaryFunction bent({Rational(1, 3), Rational(1, 2)});
    std::mt19937_64 rng(26);
    for (int i = 0; i < 20; ++i) {
        const int N = 2;
        LogPowerPolynomial<long double> p(N);
        const auto r = test::random_logpower(rng, 1, 2, 3);
        for (const auto& [key, c] : r.terms()) p.add_term(key.first, key.second, c.convert_to<long double>());
        if (p.is_zero()) continue;
        const int max_j = p.max_power();
        const auto sub = substitute_boundary(p, bent, N);
        auto err = [&](long double t) { return std::abs(sub.evaluate(t) - p.evaluate(t / 3 + t * t / 2)); };
        const long double e3 = err(1e-3L), e4 = err(1e-4L);
        // Exact substitutions leave only roundoff.
        if (e3 < 1e-18L || e4 < 1e-18L) continue;
        const double slope = static_cast<double>(std::log10(e3 / e4));
        CHECK(slope >= N + 1 - max_j - 0.1);
    }
}
