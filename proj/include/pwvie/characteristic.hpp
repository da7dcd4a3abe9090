#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pwvie/error.hpp"
#include "pwvie/model.hpp"
#include "pwvie/rational.hpp"

namespace pwvie {

/// Data of the characteristic function
///   B(j) = K_n(0,0) + sum_i beta_i^{1+j} (K_i(0,0) - K_{i+1}(0,0)),  beta_i = alpha_i'(0).
struct CharacteristicData {
    Rational constant;                 // K_n(0,0)
    std::vector<Rational> slopes;      // beta_i
    std::vector<Rational> jumps;       // K_i(0,0) - K_{i+1}(0,0)

    explicit CharacteristicData(const ProblemSpec& spec) : constant(spec.kernels.back().coeff(0, 0)) {
        for (std::size_t i = 0; i < spec.boundaries.size(); ++i) {
            slopes.push_back(spec.boundaries[i].slope());
            jumps.push_back(spec.kernels[i].coeff(0, 0) - spec.kernels[i + 1].coeff(0, 0));
        }
    }
};

/// Exact B(j) for integer j >= 0.
inline Rational char_value_exact(const ProblemSpec& spec, int j) {
    const CharacteristicData d(spec);
    Rational sum = d.constant;
    for (std::size_t i = 0; i < d.slopes.size(); ++i) {
        Rational p = d.slopes[i];
        for (int e = 0; e < j; ++e) p *= d.slopes[i];
        sum += p * d.jumps[i];
    }
    return sum;
}

inline double char_value(const ProblemSpec& spec, double j) {
    const CharacteristicData d(spec);
    double sum = d.constant.convert_to<double>();
    for (std::size_t i = 0; i < d.slopes.size(); ++i)
        sum += std::pow(d.slopes[i].convert_to<double>(), 1 + j) * d.jumps[i].convert_to<double>();
    return sum;
}

/// d^k B / dj^k = sum_i beta_i^{1+j} (ln beta_i)^k (K_i(0,0) - K_{i+1}(0,0)),  k >= 1.
inline double char_derivative(const ProblemSpec& spec, double j, int k) {
    if (k < 1) throw Error(ErrorCode::Domain, "derivative order must be >= 1");
    const CharacteristicData d(spec);
    double sum = 0;
    for (std::size_t i = 0; i < d.slopes.size(); ++i) {
        const double beta = d.slopes[i].convert_to<double>();
        sum += std::pow(beta, 1 + j) * std::pow(std::log(beta), k) * d.jumps[i].convert_to<double>();
    }
    return sum;
}

struct CharacteristicRoot {
    int j = 0;
    int multiplicity = 0;
    friend bool operator==(const CharacteristicRoot&, const CharacteristicRoot&) = default;
};

struct CharacteristicReport {
    int N = 0;
    double tolerance = 1e-12;
    std::vector<Rational> values;  // B(0..N), exact
    std::vector<CharacteristicRoot> roots;
    int total_free_constants = 0;
    std::vector<std::string> warnings;

    int multiplicity(int j) const {
        for (const auto& r : roots)
            if (r.j == j) return r.multiplicity;
        return 0;
    }
    bool regular_through(int n) const {
        for (const auto& r : roots)
            if (r.j <= n) return false;
        return true;
    }
};

inline constexpr int kMultiplicityCap = 16;

/// Integer zeros of B in {0..N} with multiplicities. B(j) is rational at
/// integer j and tested exactly; derivatives involve ln beta_i and use `tol`.
inline CharacteristicReport find_integer_roots(const ProblemSpec& spec, int N, double tol = 1e-12) {
    if (N < 0) throw Error(ErrorCode::Domain, "N must be >= 0");
    CharacteristicReport report;
    report.N = N;
    report.tolerance = tol;
    for (int j = 0; j <= N; ++j) {
        const Rational b = char_value_exact(spec, j);
        report.values.push_back(b);
        if (b != 0) {
            if (std::abs(b.convert_to<double>()) < 1e-8)
                report.warnings.push_back("B(" + std::to_string(j) + ") = " + b.str() +
                                          " is nearly zero; coefficient x_" + std::to_string(j) +
                                          " is ill-conditioned");
            continue;
        }
        int k = 1;
        while (std::abs(char_derivative(spec, j, k)) <= tol) {
            if (++k > kMultiplicityCap)
                throw Error(ErrorCode::DegenerateCharacteristic,
                            "all derivatives of B vanish at j = " + std::to_string(j));
        }
        report.roots.push_back({j, k});
        report.total_free_constants += k;
    }
    return report;
}

/// Smallest integer j beyond which sum_i beta_i^{1+j} |jump_i| < |K_n(0,0)|,
/// so B has no zeros there. Returns -1 when K_n(0,0) = 0.
inline int root_free_threshold(const ProblemSpec& spec) {
    const CharacteristicData d(spec);
    const double bound = std::abs(d.constant.convert_to<double>());
    if (bound == 0) return -1;
    for (int j = 0; j < 100000; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < d.slopes.size(); ++i)
            s += std::pow(d.slopes[i].convert_to<double>(), 1 + j) * std::abs(d.jumps[i].convert_to<double>());
        if (s < bound) return j;
    }
    return -1;
}

}  // namespace pwvie
