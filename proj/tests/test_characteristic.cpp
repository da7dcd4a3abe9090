#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace pwvie;
using Catch::Matchers::WithinAbs;

TEST_CASE("characteristic values") {
    CHECK(char_value_exact(test::problem("example1"), 0) == Rational(3, 2));
    CHECK(char_value_exact(test::problem("example2"), 0) == 0);
    const auto single = test::problem("single");
    for (int j = 0; j < 5; ++j) CHECK(char_value_exact(single, j) == single.kernels[0].coeff(0, 0));
}

TEST_CASE("characteristic derivatives") {
    CHECK_THAT(char_derivative(test::problem("example2"), 0, 1), WithinAbs(-std::log(2.0), 1e-15));
    CHECK_THAT(char_derivative(test::problem("example1"), 0, 1), WithinAbs(std::log(2.0) / 2, 1e-15));
    CHECK(char_derivative(test::problem("single"), 1.5, 3) == 0);
    CHECK_THROWS_AS(char_derivative(test::problem("single"), 0, 0), Error);
}

TEST_CASE("integer roots") {
    const auto r2 = find_integer_roots(test::problem("example2"), 4);
    REQUIRE(r2.roots.size() == 1);
    CHECK(r2.roots[0] == CharacteristicRoot{0, 1});
    CHECK(r2.total_free_constants == 1);

    const auto r1 = find_integer_roots(test::problem("example1"), 4);
    CHECK(r1.roots.empty());
    CHECK(r1.total_free_constants == 0);

    // Slopes 1/4 and 1/2 with jumps chosen so that B(0) = B'(0) = 0.
    const auto spec = test::problem("multiplicity2");
    CHECK(char_value_exact(spec, 0) == 0);
    CHECK(std::abs(char_derivative(spec, 0, 1)) < 1e-15);
    CHECK(std::abs(char_derivative(spec, 0, 2)) > 0.1);
    const auto r3 = find_integer_roots(spec, 4);
    REQUIRE(r3.roots.size() == 1);
    CHECK(r3.roots[0] == CharacteristicRoot{0, 2});
    CHECK(r3.total_free_constants == 2);
}

TEST_CASE("derivative agrees with finite differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> J(0.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const auto spec = test::random_spec(rng);
        const double j = J(rng), h = 1e-5;
        const double fd = (char_value(spec, j + h) - char_value(spec, j - h)) / (2 * h);
        CHECK_THAT(char_derivative(spec, j, 1), WithinAbs(fd, 1e-6));
    }
}

TEST_CASE("no roots in the tail") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 50; ++i) {
        const auto spec = test::random_spec(rng);
        const CharacteristicData d(spec);
        const double kn = std::abs(d.constant.convert_to<double>());
        // First j with sum beta^{1+j} |jump| < |K_n(0,0)|.
        int tail = 0;
        for (;; ++tail) {
            double s = 0;
            for (std::size_t b = 0; b < d.slopes.size(); ++b)
                s += std::pow(d.slopes[b].convert_to<double>(), 1 + tail) * std::abs(d.jumps[b].convert_to<double>());
            if (s < kn) break;
        }
        const auto report = find_integer_roots(spec, tail + 10);
        for (const auto& r : report.roots) CHECK(r.j < tail);
    }
}

TEST_CASE("report consistency") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 100; ++i) {
        const auto spec = test::random_spec(rng);
        const int N = 6;
        const auto report = find_integer_roots(spec, N);
        REQUIRE(report.values.size() == static_cast<std::size_t>(N + 1));
        int total = 0, prev = -1;
        for (const auto& r : report.roots) {
            CHECK(r.j > prev);
            CHECK(r.j <= N);
            CHECK(r.multiplicity >= 1);
            CHECK(report.values[static_cast<std::size_t>(r.j)] == 0);
            total += r.multiplicity;
            prev = r.j;
        }
        CHECK(total == report.total_free_constants);
        for (int j = 0; j <= N; ++j)
            if (report.values[static_cast<std::size_t>(j)] != 0) CHECK(report.multiplicity(j) == 0);
    }
}
