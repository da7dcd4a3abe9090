#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "pwvie/error.hpp"

namespace pwvie {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussRule& gauss_rule(int order) {
    if (order < 1) throw Error(ErrorCode::Domain, "quadrature order must be >= 1");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    const auto zeros = boost::math::legendre_p_zeros<double>(order);  // non-negative half
    auto weight = [order](double x) {
        const double dp = boost::math::legendre_p_prime<double>(order, x);
        return 2.0 / ((1 - x * x) * dp * dp);
    };
    for (auto z = zeros.rbegin(); z != zeros.rend(); ++z) {
        if (*z == 0) continue;
        rule.nodes.push_back(-*z);
        rule.weights.push_back(weight(*z));
    }
    if (order % 2) {
        rule.nodes.push_back(0);
        rule.weights.push_back(weight(0));
    }
    for (double z : zeros) {
        if (z == 0) continue;
        rule.nodes.push_back(z);
        rule.weights.push_back(weight(z));
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

/// Composite Gauss-Legendre over `panels` equal pieces of [a, b].
template <class F>
double quadrature(F&& f, double a, double b, int order = 8, int panels = 1) {
    if (a > b) throw Error(ErrorCode::Domain, "quadrature with a > b");
    if (a == b) return 0;
    const auto& rule = gauss_rule(order);
    const double width = (b - a) / panels;
    double sum = 0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width, half = width / 2, mid = lo + half;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * half * f(mid + half * rule.nodes[k]);
    }
    return sum;
}

namespace detail {

template <class Real, class F>
Real simpson_step(F& f, Real a, Real fa, Real m, Real fm, Real b, Real fb, Real whole, Real tol, int depth) {
    const Real lm = (a + m) / 2, rm = (m + b) / 2;
    const Real flm = f(lm), frm = f(rm);
    const Real left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Real right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Real delta = left + right - whole;
    using std::abs;
    if (depth <= 0 || abs(delta) <= 15 * tol) return left + right + delta / 15;
    return simpson_step(f, a, fa, lm, flm, m, fm, left, tol / 2, depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. Used by the verifier so that
/// its integrals do not share the solver's Gauss rule.
template <class Real, class F>
Real adaptive_simpson(F&& f, Real a, Real b, Real tol = Real(1e-12), int max_depth = 40) {
    if (a > b) throw Error(ErrorCode::Domain, "quadrature with a > b");
    if (a == b) return 0;
    // Split once so a symmetric integrand cannot fool the first estimate.
    const int pieces = 4;
    Real sum = 0;
    for (int p = 0; p < pieces; ++p) {
        const Real lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces, m = (lo + hi) / 2;
        const Real flo = f(lo), fm = f(m), fhi = f(hi);
        sum += detail::simpson_step(f, lo, flo, m, fm, hi, fhi, (hi - lo) / 6 * (flo + 4 * fm + fhi), tol / pieces,
                                    max_depth);
    }
    return sum;
}

/// int_0^b f(s) ds through s = b u^2, which removes integrable log
/// singularities at 0 and never evaluates f(0).
template <class Real, class F>
Real adaptive_simpson_from_zero(F&& f, Real b, Real tol = Real(1e-12), int max_depth = 40) {
    if (b < 0) throw Error(ErrorCode::Domain, "quadrature with b < 0");
    if (b == 0) return 0;
    auto g = [&](Real u) -> Real {
        if (u == 0) return 0;
        return 2 * b * u * f(b * u * u);
    };
    return adaptive_simpson<Real>(g, Real(0), Real(1), tol, max_depth);
}

}  // namespace pwvie
