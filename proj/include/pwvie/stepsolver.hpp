#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pwvie/error.hpp"
#include "pwvie/mesh.hpp"
#include "pwvie/model.hpp"
#include "pwvie/quadrature.hpp"

namespace pwvie {

using Row = std::vector<double>;

namespace detail {

inline void add_stencil(Row& row, const Stencil& s, double scale) {
    for (int i = 0; i < s.size; ++i)
        row[s.index[static_cast<std::size_t>(i)]] += scale * s.weight[static_cast<std::size_t>(i)];
}

/// Adds the weights of  int_{from}^{to} kernel(piece, s) x(s) ds  over every
/// sector of t, x interpolated on the mesh with nodes <= max_index.
template <class Kernel>
void add_integral_row(Row& row, const Mesh& mesh, const NumericModel<double>& model, double t, double from,
                      double to, std::size_t max_index, int order, Kernel&& kernel) {
    const auto& rule = gauss_rule(order);
    const auto& x = mesh.nodes();
    for (std::size_t piece = 0; piece < model.pieces(); ++piece) {
        if (model.kernel_dt_is_zero(piece)) continue;
        const double lo = std::max(from, model.lower(piece, t));
        const double hi = std::min(to, model.upper(piece, t));
        if (!(hi > lo)) continue;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), lo) - x.begin());
        i = i == 0 ? 0 : i - 1;
        for (; i + 1 < x.size() && x[i] < hi; ++i) {
            const double a = std::max(lo, x[i]), b = std::min(hi, x[i + 1]);
            if (!(b > a)) continue;
            const double half = (b - a) / 2, mid = a + half;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double s = mid + half * rule.nodes[q];
                add_stencil(row, mesh.stencil(s, max_index), rule.weights[q] * half * kernel(piece, s));
            }
        }
    }
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// f̄(t) = K_n(t,t)^{-1} (f'(t) - dK_1(t,0)/dt f(0)/K_1(0,0)).
inline double build_rhs_fbar(const ProblemSpec& spec, double t) { return NumericModel<double>(spec).fbar(t); }

/// (A x)(t) = sum_i K_n(t,t)^{-1} alpha_i'(t) (K_i - K_{i+1})(t, alpha_i(t)) x(alpha_i(t))
template <class X>
double apply_A(const NumericModel<double>& model, X&& x, double t) {
    double sum = 0;
    for (std::size_t i = 0; i + 1 < model.pieces(); ++i) sum += model.functional_coefficient(i, t) * x(model.alpha(i, t));
    return sum;
}

/// (K x)(t) = sum_i int over sector i of K_n(t,t)^{-1} K_i^(1)(t,s) x(s) ds
template <class X>
double apply_K(const NumericModel<double>& model, X&& x, double t, int order = 8, int panels = 4) {
    if (!model.has_integral_term()) return 0;
    const double d = model.checked_diagonal(t);
    double sum = 0;
    for (std::size_t piece = 0; piece < model.pieces(); ++piece) {
        if (model.kernel_dt_is_zero(piece)) continue;
        sum += quadrature([&](double s) { return model.kernel_dt(piece, t, s) * x(s); }, model.lower(piece, t),
                          model.upper(piece, t), order, panels);
    }
    return sum / d;
}

inline double apply_A(const ProblemSpec& spec, const std::function<double(double)>& x, double t) {
    return apply_A(NumericModel<double>(spec), x, t);
}
inline double apply_K(const ProblemSpec& spec, const std::function<double(double)>& x, double t) {
    return apply_K(NumericModel<double>(spec), x, t);
}

struct StepOptions {
    enum class InitialGuess { Fbar, Zero };
    double tol = 1e-10;
    int nodes = 17;
    int max_iterations = 200;
    int quad_order = 8;
    InitialGuess initial = InitialGuess::Fbar;
};

struct StepSolution {
    MeshFunction x;
    SolverConstants constants;
    std::vector<int> iterations;              // per subinterval
    std::vector<std::vector<double>> ratios;  // successive-change ratios per subinterval
    double contraction_bound = 0;             // q + c h
    double max_residual = 0;                  // max node residual of x + Ax + Kx - f̄
};

namespace detail {

struct IterationResult {
    int iterations = 0;
    std::vector<double> ratios;
};

/// Successive approximations y <- rhs - B y on the unknown entries.
inline IterationResult iterate_fixed_point(const std::vector<Row>& B, const std::vector<double>& rhs,
                                           std::vector<double>& y, double tol, int max_iterations,
                                           const std::function<double(const std::vector<double>&)>& norm) {
    IterationResult out;
    double prev = -1;
    int growing = 0;
    std::vector<double> next(y.size());
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t p = 0; p < y.size(); ++p) {
            double s = rhs[p];
            for (std::size_t r = 0; r < y.size(); ++r) s -= B[p][r] * y[r];
            next[p] = s;
        }
        std::vector<double> diff(y.size());
        double sup = 0;
        for (std::size_t p = 0; p < y.size(); ++p) {
            diff[p] = next[p] - y[p];
            sup = std::max(sup, std::abs(diff[p]));
        }
        const double change = norm(diff);
        const double floor = 1e-13 * std::max(1.0, norm(next));
        if (prev > floor && change > floor) {
            const double ratio = change / prev;
            out.ratios.push_back(ratio);
            growing = ratio > 1 ? growing + 1 : 0;
            if (growing >= 3)
                throw Error(ErrorCode::ContractionFailure, "successive changes grow, measured ratio " + std::to_string(ratio));
        }
        y = next;
        prev = change;
        out.iterations = it;
        if (sup <= tol) return out;
    }
    const double last = out.ratios.empty() ? 0.0 : out.ratios.back();
    throw Error(ErrorCode::ContractionFailure, "no convergence after " + std::to_string(max_iterations) +
                                                   " iterations, measured ratio " + std::to_string(last));
}

/// Solves panel m of the mesh given node values of all earlier panels in x.
/// The first node of a later panel is the history value and stays fixed.
inline IterationResult solve_panel(const NumericModel<double>& model, const Mesh& mesh, std::vector<double>& x,
                                   std::size_t m, const StepOptions& opt, double& max_residual) {
    const auto& t = mesh.nodes();
    const std::size_t first = mesh.panel_first(m), last = mesh.panel_last(m);
    const std::size_t unknown0 = m == 0 ? first : first + 1;
    const std::size_t history_end = m == 0 ? last : first;
    const std::size_t nu = last - unknown0 + 1;

    std::vector<Row> B(nu, Row(nu, 0.0));
    std::vector<double> rhs(nu), y(nu);
    for (std::size_t p = unknown0; p <= last; ++p) {
        Row row(last + 1, 0.0);
        for (std::size_t i = 0; i + 1 < model.pieces(); ++i) {
            const double arg = model.alpha(i, t[p]);
            if (arg > t[history_end] * (1 + 1e-14))
                throw Error(ErrorCode::StepOrdering,
                            "alpha(t) = " + std::to_string(arg) + " leaves the solved history; reduce eps");
            add_stencil(row, mesh.stencil(std::min(arg, t[history_end]), history_end),
                        model.functional_coefficient(i, t[p]));
        }
        if (model.has_integral_term()) {
            const double d = model.checked_diagonal(t[p]);
            add_integral_row(row, mesh, model, t[p], 0.0, t[p], last, opt.quad_order,
                             [&](std::size_t piece, double s) { return model.kernel_dt(piece, t[p], s) / d; });
        }
        const std::size_t r = p - unknown0;
        rhs[r] = model.fbar(t[p]);
        for (std::size_t c = 0; c < unknown0; ++c) rhs[r] -= row[c] * x[c];
        for (std::size_t c = unknown0; c <= last; ++c) B[r][c - unknown0] = row[c];
        y[r] = opt.initial == StepOptions::InitialGuess::Fbar ? rhs[r] : 0.0;
    }
    auto res = iterate_fixed_point(B, rhs, y, opt.tol, opt.max_iterations, sup_norm);
    for (std::size_t r = 0; r < nu; ++r) {
        x[unknown0 + r] = y[r];
        double s = y[r] - rhs[r];
        for (std::size_t c = 0; c < nu; ++c) s += B[r][c] * y[c];
        max_residual = std::max(max_residual, std::abs(s));
    }
    return res;
}

}  // namespace detail

/// Theorem-1 step method: x + Ax + Kx = f̄ on [0,T], solved subinterval by
/// subinterval with successive approximations on each.
inline StepSolution solve_regular(const ProblemSpec& spec, const SolverConstants& consts, const StepOptions& opt = {}) {
    if (!consts.theorem1)
        throw Error(ErrorCode::ConditionViolated, "|A(0)| < 1 does not hold; the step method does not apply");
    const NumericModel<double> model(spec);
    const Mesh mesh = Mesh::step_mesh(consts.h, consts.eps, model.horizon(), opt.nodes);
    std::vector<double> x(mesh.size(), 0.0);
    StepSolution out;
    out.constants = consts;
    out.contraction_bound = consts.q + consts.c * consts.h;
    for (std::size_t m = 0; m < mesh.panels(); ++m) {
        auto res = detail::solve_panel(model, mesh, x, m, opt, out.max_residual);
        out.iterations.push_back(res.iterations);
        out.ratios.push_back(std::move(res.ratios));
    }
    out.x = MeshFunction(mesh, std::move(x));
    return out;
}

/// Appends the subinterval [history end, b] to a solved history and solves
/// the second-kind equation there.
inline StepSolution extend_step(const ProblemSpec& spec, const StepSolution& history, double b,
                                const StepOptions& opt = {}) {
    const NumericModel<double> model(spec);
    const Mesh& old = history.x.mesh();
    if (!(b > old.end())) throw Error(ErrorCode::Domain, "new subinterval must extend the history");
    if (b > model.horizon() * (1 + 1e-12)) throw Error(ErrorCode::Domain, "subinterval beyond T");
    auto breaks = old.breaks();
    breaks.push_back(b);
    const Mesh mesh(std::move(breaks), old.nodes_per_panel());
    std::vector<double> x = history.x.values();
    x.resize(mesh.size(), 0.0);
    StepSolution out = history;
    auto res = detail::solve_panel(model, mesh, x, mesh.panels() - 1, opt, out.max_residual);
    out.iterations.push_back(res.iterations);
    out.ratios.push_back(std::move(res.ratios));
    out.x = MeshFunction(mesh, std::move(x));
    return out;
}

/// Fixed point of x = -Ax - Kx + f̄ on [0, h] only.
inline StepSolution solve_first_interval(const ProblemSpec& spec, const SolverConstants& consts, const StepOptions& opt = {}) {
    SolverConstants first = consts;
    const double T = spec.T.convert_to<double>();
    if (first.h < T) {
        ProblemSpec cut = spec;
        cut.T = rational_from_double(first.h);
        return solve_regular(cut, first, opt);
    }
    return solve_regular(spec, first, opt);
}

}  // namespace pwvie
