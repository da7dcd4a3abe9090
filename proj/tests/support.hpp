#pragma once

#include <map>
#include <random>
#include <tuple>
#include <string>
#include <vector>

#include "pwvie/pwvie.hpp"

namespace pwvie::test {

inline ProblemSpec problem(const std::string& name) {
    return load_problem(std::string(PWVIE_PROBLEMS) + "/" + name + ".json");
}

inline std::string problem_path(const std::string& name) { return std::string(PWVIE_PROBLEMS) + "/" + name + ".json"; }

/// Kernel from (power of t, power of s, coefficient) triples.
inline BivariatePolynomial<Rational> kernel(std::initializer_list<std::tuple<int, int, Rational>> terms) {
    std::map<std::pair<int, int>, Rational> m;
    for (const auto& [nu, mu, c] : terms) m[{nu, mu}] += c;
    return BivariatePolynomial<Rational>(std::move(m));
}

inline Rational small_rational(std::mt19937_64& rng, int num = 9, int den = 6) {
    std::uniform_int_distribution<int> n(-num, num), d(1, den);
    return Rational(n(rng), d(rng));
}

inline LogPowerPolynomial<Rational> random_logpower(std::mt19937_64& rng, int order, int max_k = 3, int terms = 4) {
    std::uniform_int_distribution<int> j(0, order), k(0, max_k), count(0, terms);
    LogPowerPolynomial<Rational> p(order);
    for (int i = count(rng); i > 0; --i) p.add_term(j(rng), k(rng), small_rational(rng));
    return p;
}

/// Random admissible problem: increasing slopes in (0,1), constant kernels
/// with a nonzero last piece, f(0) != 0.
inline ProblemSpec random_spec(std::mt19937_64& rng, int max_pieces = 4) {
    std::uniform_int_distribution<int> pieces(1, max_pieces), den(2, 9);
    ProblemSpec spec;
    spec.T = 1;
    const int n = pieces(rng);
    std::vector<Rational> slopes;
    while (static_cast<int>(slopes.size()) < n - 1) {
        const int q = den(rng);
        std::uniform_int_distribution<int> p(1, q - 1);
        const Rational s(p(rng), q);
        if (std::find(slopes.begin(), slopes.end(), s) == slopes.end()) slopes.push_back(s);
    }
    std::sort(slopes.begin(), slopes.end());
    for (const auto& s : slopes) spec.boundaries.emplace_back(std::vector<Rational>{s});
    for (int i = 0; i < n; ++i) {
        Rational k = small_rational(rng, 5, 3);
        if (k == 0) k = 1;
        spec.kernels.push_back(BivariatePolynomial<Rational>::constant(k));
    }
    Rational f0 = small_rational(rng, 5, 2);
    if (f0 == 0) f0 = 1;
    spec.rhs = Polynomial<Rational>({f0, small_rational(rng)});
    return spec;
}

}  // namespace pwvie::test
