#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pwvie/error.hpp"
#include "pwvie/model.hpp"
#include "pwvie/quadrature.hpp"
#include "pwvie/refinement.hpp"

namespace pwvie {

/// Residuals of the original and differentiated equations for a candidate
/// solution, using adaptive Simpson rather than the solvers' Gauss rule.
template <class Real = double>
class Verifier {
public:
    using Function = std::function<Real(Real)>;

    explicit Verifier(const ProblemSpec& spec, Real tol = Real(1e-12)) : model_(spec), tol_(tol) {}

    const NumericModel<Real>& model() const { return model_; }

    /// a K_1(t,0) + sum_i int_{alpha_{i-1}(t)}^{alpha_i(t)} K_i(t,s) x(s) ds - f(t)
    Real residual_eq3(Real a, const Function& x, Real t) const {
        check(t);
        Real sum = a * model_.kernel(0, t, Real(0));
        for (std::size_t piece = 0; piece < model_.pieces(); ++piece)
            sum += sector_integral(piece, t, [&](Real s) { return model_.kernel(piece, t, s) * x(s); });
        return sum - model_.rhs(t);
    }

    /// x(t) + (Ax)(t) + (Kx)(t) - f̄(t)
    Real residual_eq6(const Function& x, Real t) const {
        check(t);
        const Real d = model_.checked_diagonal(t);
        Real sum = x(t);
        for (std::size_t i = 0; i + 1 < model_.pieces(); ++i) sum += model_.functional_coefficient(i, t) * x(model_.alpha(i, t));
        for (std::size_t piece = 0; piece < model_.pieces(); ++piece) {
            if (model_.kernel_dt_is_zero(piece)) continue;
            sum += sector_integral(piece, t, [&](Real s) { return model_.kernel_dt(piece, t, s) / d * x(s); });
        }
        return sum - model_.fbar(t);
    }

    /// F(x)(t) - g(t) with F(x) = K_n(t,t) x(t) + sum_i w_i(t) x(alpha_i(t)) + sum_i int K_i^(1)(t,s) x(s) ds
    Real residual_operator_F(const Function& x, Real t) const {
        check(t);
        Real sum = model_.diagonal(t) * x(t);
        for (std::size_t i = 0; i + 1 < model_.pieces(); ++i) sum += model_.weight(i, t) * x(model_.alpha(i, t));
        for (std::size_t piece = 0; piece < model_.pieces(); ++piece) {
            if (model_.kernel_dt_is_zero(piece)) continue;
            sum += sector_integral(piece, t, [&](Real s) { return model_.kernel_dt(piece, t, s) * x(s); });
        }
        return sum - model_.forcing(t);
    }

    /// int K(t,s) a eta_sigma(s) ds with the unit-mass bump
    /// eta_sigma(s) = 6 s (sigma - s) / sigma^3 on [0, sigma].
    Real mollified_delta(Real a, Real t, Real sigma) const {
        check(t);
        if (!(sigma > 0 && sigma < t)) throw Error(ErrorCode::Domain, "need 0 < sigma < t");
        auto integrand = [&](Real s) {
            return model_.kernel(model_.sector(t, s), t, s) * a * 6 * s * (sigma - s) / (sigma * sigma * sigma);
        };
        Real sum = 0, lo = 0;
        for (std::size_t i = 0; i + 1 < model_.pieces(); ++i) {
            const Real b = model_.alpha(i, t);
            if (b >= sigma) break;
            sum += adaptive_simpson<Real>(integrand, lo, b, tol_);
            lo = b;
        }
        return sum + adaptive_simpson<Real>(integrand, lo, sigma, tol_);
    }

private:
    void check(Real t) const {
        if (!(t > 0)) throw Error(ErrorCode::Domain, "residuals are evaluated for t > 0");
    }

    template <class G>
    Real sector_integral(std::size_t piece, Real t, G&& g) const {
        const Real lo = model_.lower(piece, t), hi = model_.upper(piece, t);
        if (!(hi > lo)) return 0;
        if (piece == 0) return adaptive_simpson_from_zero<Real>(g, hi, tol_);
        return adaptive_simpson<Real>(g, lo, hi, tol_);
    }

    NumericModel<Real> model_;
    Real tol_;
};

inline double residual_eq3(const ProblemSpec& spec, const GeneralizedSolution& sol, double t) {
    return Verifier<double>(spec).residual_eq3(sol.a.convert_to<double>(), [&](double s) { return sol.regular(s); }, t);
}

inline double residual_eq3(const ProblemSpec& spec, double a, const std::function<double(double)>& x, double t) {
    return Verifier<double>(spec).residual_eq3(a, x, t);
}

inline double residual_eq6(const ProblemSpec& spec, const std::function<double(double)>& x, double t) {
    return Verifier<double>(spec).residual_eq6(x, t);
}

inline double residual_operator_F(const ProblemSpec& spec, const std::function<double(double)>& x, double t) {
    return Verifier<double>(spec).residual_operator_F(x, t);
}

struct DecayOrder {
    bool exact = false;
    double slope = 0;
};

/// Least-squares slope of log|r| against log t; "exact" when every residual
/// is at or below `floor`.
inline DecayOrder decay_order(const std::vector<std::pair<double, double>>& values, double floor = 0.0) {
    if (values.size() < 3) throw Error(ErrorCode::Domain, "decay order needs at least 3 points");
    DecayOrder out;
    bool all_small = true;
    for (const auto& [t, r] : values) {
        if (!(t > 0)) throw Error(ErrorCode::Domain, "decay order needs t > 0");
        if (std::abs(r) > floor) all_small = false;
    }
    if (all_small) {
        out.exact = true;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [t, r] : values) {
        const double x = std::log(t);
        const double y = std::log(std::max(std::abs(r), std::numeric_limits<double>::min()));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

struct ResidualReport {
    std::vector<double> grid;
    std::vector<double> eq3;
    std::vector<double> eq6;
    std::vector<std::string> representation;  // "asymptotic" below t_split, else "mesh"
    double max_abs = 0;
    std::optional<DecayOrder> decay;
};

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(points == 1 ? hi : lo + (hi - lo) * i / (points - 1));
    return g;
}

inline ResidualReport verify_solution(const ProblemSpec& spec, const GeneralizedSolution& sol,
                                      const std::vector<double>& grid) {
    const Verifier<double> v(spec);
    const double a = sol.a.convert_to<double>();
    const auto x = [&](double s) { return sol.regular(s); };
    ResidualReport rep;
    double prev = 0;
    for (double t : grid) {
        if (!(t > prev) && !rep.grid.empty()) throw Error(ErrorCode::Domain, "grid must increase");
        if (!(t > 0) || t > sol.horizon * (1 + 1e-12)) throw Error(ErrorCode::Domain, "grid point outside (0, T]");
        prev = t;
        rep.grid.push_back(t);
        rep.eq3.push_back(v.residual_eq3(a, x, t));
        rep.eq6.push_back(v.residual_eq6(x, t));
        rep.representation.push_back(t < sol.t_split ? "asymptotic" : "mesh");
        rep.max_abs = std::max({rep.max_abs, std::abs(rep.eq3.back()), std::abs(rep.eq6.back())});
    }
    return rep;
}

}  // namespace pwvie
