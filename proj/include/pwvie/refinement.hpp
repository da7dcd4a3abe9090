#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwvie/asymptotics.hpp"
#include "pwvie/error.hpp"
#include "pwvie/logpower.hpp"
#include "pwvie/mesh.hpp"
#include "pwvie/model.hpp"
#include "pwvie/stepsolver.hpp"

namespace pwvie {

/// a = f(0) / K_1(0,0)
inline Rational singular_coefficient(const ProblemSpec& spec) {
    const Rational k1 = spec.kernels.front().coeff(0, 0);
    if (k1 == 0) throw Error(ErrorCode::NotCovered, "K₁(0,0) = 0");
    return spec.rhs.coeff(0) / k1;
}

/// x̂ with every free parameter replaced by its value.
inline LogPowerPolynomial<double> bind_expansion(const AsymptoticSolution& asym, const std::map<int, double>& params) {
    LogPowerPolynomial<double> out(asym.order);
    auto bind = [&](const auto& symbolic) {
        for (const auto& [key, c] : symbolic.terms()) out.add_term(key.first, key.second, c.evaluate(params));
    };
    if (asym.exact) {
        bind(asym.exact->as_logpower(asym.order));
    } else {
        bind(asym.numeric.as_logpower(asym.order));
    }
    return out;
}

/// Right side of the equation for v in x = x̂ + t^N* v:
///   gamma(t) = (g(t) - F(x̂)(t)) / (t^N* K_n(t,t)).
/// The residual F(x̂) - g is expanded as a log-power series so the division
/// by t^N* is exact; for curved boundaries the series is only used near 0
/// and the residual is evaluated directly (long double, exact antiderivatives)
/// further out.
class Gamma {
public:
    static constexpr double kSeriesSwitch = 1e-2;

    Gamma(const ProblemSpec& spec, const LogPowerPolynomial<double>& xhat, int Nstar, double t0 = 1e-6)
        : spec_(spec), forms_(derive_forms(spec)), model_(spec_, forms_), Nstar_(Nstar), xhat_(xhat) {
        if (Nstar < 0) throw Error(ErrorCode::Domain, "N* must be >= 0");
        linear_ = std::all_of(spec.boundaries.begin(), spec.boundaries.end(), [](const auto& b) { return b.is_linear(); });

        int D = std::max(forms_.diagonal.degree(), 0);
        for (const auto& w : forms_.weights) D = std::max(D, w.degree());
        for (const auto& k : forms_.kernel_dt)
            for (const auto& [key, c] : k.terms()) D = std::max(D, key.first + key.second + 1);
        D = std::max(D, forms_.forcing.degree());
        const int order = std::max(xhat.max_power(), 0) + D + (linear_ ? 1 : 12);
        const auto residual = operator_series(spec_, forms_, xhat.with_order(order), order);

        double scale = 1;
        for (const auto& [key, c] : xhat.terms()) scale = std::max(scale, std::abs(c));
        double data = 1;
        for (const auto& [key, c] : residual.terms()) data = std::max(data, std::abs(c));
        shifted_ = LogPowerPolynomial<double>(order);
        for (const auto& [key, c] : residual.terms()) {
            const auto [j, k] = key;
            if (j < Nstar || (j == Nstar && k > 0)) {
                if (std::abs(c) > 1e-8 * scale * data)
                    throw Error(ErrorCode::ConditionViolated, "residual of x̂ is not O(t^N*): term t^" +
                                                                  std::to_string(j) + " ln^" + std::to_string(k) +
                                                                  " t has coefficient " + std::to_string(c));
                continue;
            }
            shifted_.add_term(j - Nstar, k, c);
        }

        if (!linear_) {
            const int gorder = std::max(xhat.max_power(), 0) + D + 2;
            for (const auto& k : forms_.kernel_dt)
                for (const auto& [key, c] : k.terms())
                    if (!antiderivative_.count(key.second))
                        antiderivative_.emplace(
                            key.second, integrate_from_zero(multiply(
                                            xhat.with_order(gorder),
                                            LogPowerPolynomial<double>::monomial(gorder, key.second, 0, 1.0))));
        }
        at_zero_ = (value(t0) - 6 * value(t0 / 2) + 8 * value(t0 / 4)) / 3;
    }

    /// Richardson limit at t = 0.
    double at_zero() const { return at_zero_; }

    double operator()(double t) const {
        if (t < 0) throw Error(ErrorCode::Domain, "gamma evaluated at t < 0");
        return t == 0 ? at_zero_ : value(t);
    }

private:
    double value(double t) const {
        if (linear_ || t < kSeriesSwitch) return -shifted_.evaluate(t) / model_.checked_diagonal(t);
        return direct(t);
    }

    double direct(double t) const {
        using L = long double;
        const L tl = t;
        const NumericModel<L> m(spec_, forms_);
        L F = m.diagonal(tl) * xhat_.evaluate(tl);
        for (std::size_t i = 0; i + 1 < m.pieces(); ++i) F += m.weight(i, tl) * xhat_.evaluate(m.alpha(i, tl));
        for (std::size_t piece = 0; piece < m.pieces(); ++piece) {
            for (const auto& [key, c] : forms_.kernel_dt[piece].terms()) {
                const auto& G = antiderivative_.at(key.second);
                const L lo = m.lower(piece, tl), hi = m.upper(piece, tl);
                const L seg = G.evaluate(hi) - (lo > 0 ? G.evaluate(lo) : L(0));
                F += c.convert_to<L>() * std::pow(tl, key.first) * seg;
            }
        }
        const L residual = F - m.forcing(tl);
        return static_cast<double>(-residual / (std::pow(tl, Nstar_) * m.checked_diagonal(tl)));
    }

    ProblemSpec spec_;
    EquationForms forms_;
    NumericModel<double> model_;
    int Nstar_;
    LogPowerPolynomial<double> xhat_;
    bool linear_ = true;
    LogPowerPolynomial<double> shifted_{0};
    std::map<int, LogPowerPolynomial<double>> antiderivative_;
    double at_zero_ = 0;
};

inline double build_gamma(const ProblemSpec& spec, const AsymptoticSolution& asym, const std::map<int, double>& params,
                          int Nstar, double t) {
    return Gamma(spec, bind_expansion(asym, params), Nstar)(t);
}

struct RefinementOptions {
    double tol = 1e-10;
    int nodes = 17;
    int max_iterations = 400;
    int quad_order = 8;
    double t_min = 1e-6;
    double l_max = 1 << 20;
};

struct RefinementResult {
    MeshFunction v;
    double l = 0;        // weight of the norm max e^{-lt}|v(t)|
    double q_att = 0;    // weighted norm of M_att
    double q1_att = 0;   // weighted norm of K_att
    std::vector<double> ratios;
    int iterations = 0;
    double gamma0 = 0;
    double attenuation_max = 0;  // max over mesh of (alpha_i(t)/t)^N*
};

namespace detail {

inline double weighted_norm(const std::vector<double>& v, const std::vector<double>& t, double l) {
    double m = 0;
    for (std::size_t p = 0; p < v.size(); ++p) m = std::max(m, std::exp(-l * t[p]) * std::abs(v[p]));
    return m;
}

inline double weighted_operator_norm(const std::vector<Row>& B, const std::vector<double>& t, double l) {
    double m = 0;
    for (std::size_t p = 0; p < B.size(); ++p) {
        double s = 0;
        for (std::size_t r = 0; r <= p; ++r) s += std::abs(B[p][r]) * std::exp(-l * (t[p] - t[r]));
        m = std::max(m, s);
    }
    return m;
}

}  // namespace detail

/// Solves v + M_att v + K_att v = gamma on [0, T'] by successive
/// approximations v_n = -(M_att + K_att) v_{n-1} + gamma, v_0 = gamma, with
///   (M_att v)(t) = sum_i K_n^{-1} alpha_i' (K_i - K_{i+1})(t, alpha_i) (alpha_i/t)^N* v(alpha_i),
///   (K_att v)(t) = int_0^t K_n^{-1} K^(1)(t,s) (s/t)^N* v(s) ds.
inline RefinementResult contraction_solve(const ProblemSpec& spec, const std::function<double(double)>& gamma, int Nstar,
                                          const SolverConstants& consts, const RefinementOptions& opt = {}) {
    if (!consts.theorem2) throw Error(ErrorCode::ConditionViolated, "condition (D) does not hold");
    const NumericModel<double> model(spec);
    const double Tp = consts.Tprime;
    const Mesh mesh = Mesh::geometric(std::min(opt.t_min, Tp / 2), Tp, opt.nodes);
    const auto& t = mesh.nodes();
    const std::size_t n = mesh.size();

    RefinementResult out;
    std::vector<Row> M(n, Row(n, 0.0)), K(n, Row(n, 0.0));
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t i = 0; i + 1 < model.pieces(); ++i) {
            const double ratio = p == 0 ? model.alpha_slope(i) : model.alpha(i, t[p]) / t[p];
            const double att = std::pow(ratio, Nstar);
            out.attenuation_max = std::max(out.attenuation_max, att);
            const double coeff = model.functional_coefficient(i, t[p]) * att;
            if (p == 0) {
                M[p][0] += coeff;
            } else {
                detail::add_stencil(M[p], mesh.stencil(std::min(model.alpha(i, t[p]), t[p]), p), coeff);
            }
        }
        if (p > 0 && model.has_integral_term()) {
            const double d = model.checked_diagonal(t[p]);
            detail::add_integral_row(K[p], mesh, model, t[p], 0.0, t[p], p, opt.quad_order,
                                     [&](std::size_t piece, double s) {
                                         return model.kernel_dt(piece, t[p], s) / d * std::pow(s / t[p], Nstar);
                                     });
        }
    }

    std::optional<double> chosen;
    for (double l = 0; l <= opt.l_max; l = l == 0 ? 1 : 2 * l) {
        const double qm = detail::weighted_operator_norm(M, t, l);
        const double qk = detail::weighted_operator_norm(K, t, l);
        if (qm + qk < 1) {
            chosen = l;
            out.q_att = qm;
            out.q1_att = qk;
            break;
        }
    }
    if (!chosen) {
        throw Error(ErrorCode::WeightExhausted,
                    "no l <= " + std::to_string(opt.l_max) + " gives q + q1 < 1 (M_att norm " +
                        std::to_string(detail::weighted_operator_norm(M, t, opt.l_max)) + ", K_att norm " +
                        std::to_string(detail::weighted_operator_norm(K, t, opt.l_max)) + ")");
    }
    out.l = *chosen;

    std::vector<Row> B(n, Row(n, 0.0));
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t r = 0; r < n; ++r) B[p][r] = M[p][r] + K[p][r];
    std::vector<double> g(n);
    for (std::size_t p = 0; p < n; ++p) g[p] = gamma(t[p]);
    out.gamma0 = g[0];
    std::vector<double> v = g;
    const double l = out.l;
    auto res = detail::iterate_fixed_point(B, g, v, opt.tol, opt.max_iterations,
                                           [&](const std::vector<double>& d) { return detail::weighted_norm(d, t, l); });
    out.ratios = std::move(res.ratios);
    out.iterations = res.iterations;
    out.v = MeshFunction(mesh, std::move(v));
    return out;
}

/// u = a delta + x with a composite regular part: the step-method mesh on
/// [0, T] (theorem-1 path) or x̂ + t^N* v on (0, T'] (theorem-2 path).
struct GeneralizedSolution {
    enum class Path { Theorem1, Theorem2 };
    Path path = Path::Theorem1;
    Rational a;
    std::optional<AsymptoticSolution> asymptotic;
    std::map<int, double> parameters;
    LogPowerPolynomial<double> xhat{0};
    MeshFunction part;  // x on [0,T] or v on [0,T']
    int Nstar = 0;
    double t_split = 0;
    double horizon = 0;

    std::string path_name() const { return path == Path::Theorem1 ? "theorem-1" : "theorem-2"; }

    double regular(double t) const {
        if (path == Path::Theorem1) return part(t);
        if (!(t > 0)) throw Error(ErrorCode::Domain, "regular part is evaluated for t > 0");
        if (t > horizon * (1 + 1e-12)) throw Error(ErrorCode::Domain, "t beyond T'");
        return xhat.evaluate(t) + std::pow(t, Nstar) * part(std::min(t, horizon));
    }
};

inline GeneralizedSolution assemble(const ProblemSpec& spec, const AsymptoticSolution& asym,
                                    const std::map<int, double>& params, const RefinementResult& refinement, int Nstar) {
    std::vector<int> given;
    for (const auto& [id, v] : params) given.push_back(id);
    if (given != asym.free_parameters())
        throw Error(ErrorCode::ParameterMismatch, "parameter set does not match the free parameters of x̂");
    GeneralizedSolution sol;
    sol.path = GeneralizedSolution::Path::Theorem2;
    sol.a = singular_coefficient(spec);
    sol.asymptotic = asym;
    sol.parameters = params;
    sol.xhat = bind_expansion(asym, params);
    sol.part = refinement.v;
    sol.Nstar = Nstar;
    sol.horizon = refinement.v.mesh().end();
    sol.t_split = refinement.v.mesh().breaks()[1];
    return sol;
}

inline GeneralizedSolution assemble_step(const ProblemSpec& spec, const StepSolution& step) {
    GeneralizedSolution sol;
    sol.path = GeneralizedSolution::Path::Theorem1;
    sol.a = singular_coefficient(spec);
    sol.part = step.x;
    sol.horizon = step.x.mesh().end();
    return sol;
}

struct Theorem2Run {
    GeneralizedSolution solution;
    RefinementResult refinement;
};

/// x̂ of order max(N*, order), gamma, v, and the assembled solution.
inline Theorem2Run solve_theorem2(const ProblemSpec& spec, const SolverConstants& consts,
                                  const std::map<int, double>& params, int order = 0,
                                  const RefinementOptions& opt = {}) {
    const int N = std::max(consts.Nstar, order);
    const auto asym = compute_asymptotics(spec, N);
    const Gamma gamma(spec, bind_expansion(asym, params), consts.Nstar, std::min(opt.t_min, consts.Tprime / 2));
    Theorem2Run run;
    run.refinement = contraction_solve(spec, std::cref(gamma), consts.Nstar, consts, opt);
    run.solution = assemble(spec, asym, params, run.refinement, consts.Nstar);
    return run;
}

}  // namespace pwvie
