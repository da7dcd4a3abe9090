#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwvie/error.hpp"
#include "pwvie/polynomial.hpp"
#include "pwvie/rational.hpp"

namespace pwvie {

/// First-kind equation  int_0^t K(t,s) u(s) ds = f(t)  on (0, T] with a kernel
/// made of n polynomial pieces separated by n-1 boundary curves.
struct ProblemSpec {
    Rational T;
    std::vector<BoundaryFunction> boundaries;            // n - 1 curves
    std::vector<BivariatePolynomial<Rational>> kernels;  // n pieces
    Polynomial<Rational> rhs;                            // f

    std::size_t pieces() const { return kernels.size(); }
};

namespace detail {

inline std::string subscript(std::size_t i) {
    static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
    std::string s = std::to_string(i), out;
    for (char ch : s) out += digits[ch - '0'];
    return out;
}

inline Rational parse_coefficient(const nlohmann::json& node, const std::string& where) {
    if (node.is_number_integer()) {
        if (node.is_number_unsigned()) return Rational(node.get<unsigned long long>());
        return Rational(node.get<long long>());
    }
    if (node.is_number_float()) return rational_from_double(node.get<double>());
    if (node.is_string()) {
        const auto text = node.get<std::string>();
        if (auto r = try_parse_rational(text)) return *r;
        throw Error(ErrorCode::UnsupportedInput, where + ": non-polynomial expression '" + text + "'");
    }
    throw Error(ErrorCode::Parse, where + ": expected a number or a \"p/q\" string");
}

inline int parse_exponent(const nlohmann::json& node, const std::string& where) {
    if (!node.is_number_integer()) throw Error(ErrorCode::Parse, where + ": exponent must be an integer");
    const auto e = node.get<long long>();
    if (e < 0) throw Error(ErrorCode::UnsupportedInput, where + ": negative exponent");
    if (e > 64) throw Error(ErrorCode::UnsupportedInput, where + ": exponent too large");
    return static_cast<int>(e);
}

}  // namespace detail

/// Parses the JSON problem document
///   {"T": 2, "boundaries": [["1/2"]], "kernels": [{"terms": [[0,0,1]]}, ...], "f": [2, 1]}
inline ProblemSpec parse_problem(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::Parse, "document must be an object");
    for (const char* field : {"T", "boundaries", "kernels", "f"})
        if (!doc.contains(field)) throw Error(ErrorCode::Parse, std::string("missing field '") + field + "'");

    ProblemSpec spec;
    spec.T = detail::parse_coefficient(doc["T"], "T");

    const auto& bnds = doc["boundaries"];
    if (!bnds.is_array()) throw Error(ErrorCode::Parse, "boundaries: expected an array");
    for (std::size_t i = 0; i < bnds.size(); ++i) {
        const auto where = "boundaries[" + std::to_string(i) + "]";
        if (!bnds[i].is_array() || bnds[i].empty())
            throw Error(ErrorCode::Parse, where + ": expected a non-empty coefficient array");
        std::vector<Rational> c;
        for (std::size_t k = 0; k < bnds[i].size(); ++k)
            c.push_back(detail::parse_coefficient(bnds[i][k], where + "[" + std::to_string(k) + "]"));
        spec.boundaries.emplace_back(std::move(c));
    }

    const auto& kers = doc["kernels"];
    if (!kers.is_array() || kers.empty()) throw Error(ErrorCode::Parse, "kernels: expected a non-empty array");
    for (std::size_t i = 0; i < kers.size(); ++i) {
        const auto where = "kernels[" + std::to_string(i) + "]";
        if (!kers[i].is_object() || !kers[i].contains("terms") || !kers[i]["terms"].is_array())
            throw Error(ErrorCode::Parse, where + ": expected {\"terms\": [[nu, mu, coeff], ...]}");
        std::map<std::pair<int, int>, Rational> terms;
        const auto& arr = kers[i]["terms"];
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const auto twhere = where + ".terms[" + std::to_string(k) + "]";
            if (!arr[k].is_array() || arr[k].size() != 3)
                throw Error(ErrorCode::Parse, twhere + ": expected [nu, mu, coeff]");
            const int nu = detail::parse_exponent(arr[k][0], twhere);
            const int mu = detail::parse_exponent(arr[k][1], twhere);
            terms[{nu, mu}] += detail::parse_coefficient(arr[k][2], twhere);
        }
        spec.kernels.emplace_back(std::move(terms));
    }

    const auto& f = doc["f"];
    if (!f.is_array() || f.empty()) throw Error(ErrorCode::Parse, "f: expected a non-empty coefficient array");
    std::vector<Rational> fc;
    for (std::size_t k = 0; k < f.size(); ++k)
        fc.push_back(detail::parse_coefficient(f[k], "f[" + std::to_string(k) + "]"));
    spec.rhs = Polynomial<Rational>(std::move(fc));

    if (spec.kernels.size() != spec.boundaries.size() + 1)
        throw Error(ErrorCode::Parse, "piece count mismatch: " + std::to_string(spec.kernels.size()) +
                                          " kernels for " + std::to_string(spec.boundaries.size()) +
                                          " boundaries");
    return spec;
}

/// Exact polynomial data derived from a spec: the differentiated equation
///   F(x) = K_n(t,t) x(t) + sum_i w_i(t) x(alpha_i(t)) + sum_i int K_i^(1)(t,s) x(s) ds = g(t)
/// with w_i(t) = alpha_i'(t) (K_i - K_{i+1})(t, alpha_i(t)) and
/// g(t) = f'(t) - a dK_1(t,0)/dt, a = f(0)/K_1(0,0).
struct EquationForms {
    Rational a;
    Polynomial<Rational> diagonal;
    std::vector<Polynomial<Rational>> weights;
    std::vector<BivariatePolynomial<Rational>> kernel_dt;
    Polynomial<Rational> forcing;
};

inline EquationForms derive_forms(const ProblemSpec& spec) {
    EquationForms out;
    const Rational k1 = spec.kernels.front().coeff(0, 0);
    if (k1 == 0) throw Error(ErrorCode::NotCovered, "K₁(0,0) = 0");
    out.a = spec.rhs.coeff(0) / k1;
    out.diagonal = spec.kernels.back().diagonal();
    for (std::size_t i = 0; i < spec.boundaries.size(); ++i) {
        const auto& alpha = spec.boundaries[i].polynomial();
        auto jump = spec.kernels[i].along(alpha) - spec.kernels[i + 1].along(alpha);
        out.weights.push_back(alpha.derivative() * jump);
    }
    for (const auto& k : spec.kernels) out.kernel_dt.push_back(k.d_dt());
    out.forcing = spec.rhs.derivative() - spec.kernels.front().at_s_zero().derivative() * out.a;
    return out;
}

/// Floating-point view of a spec for the numeric solvers. Pieces are
/// 0-based: piece i lives between lower(i,t) and upper(i,t).
template <class Real = double>
class NumericModel {
public:
    explicit NumericModel(const ProblemSpec& spec) : NumericModel(spec, derive_forms(spec)) {}

    NumericModel(const ProblemSpec& spec, const EquationForms& forms) {
        T_ = to_real<Real>(spec.T);
        a_ = to_real<Real>(forms.a);
        for (const auto& b : spec.boundaries) {
            alpha_.push_back(b.polynomial().template cast<Real>());
            alpha_d_.push_back(b.polynomial().derivative().template cast<Real>());
        }
        for (const auto& k : spec.kernels) kernel_.push_back(k.template cast<Real>());
        for (const auto& k : forms.kernel_dt) {
            kernel_dt_.push_back(k.template cast<Real>());
            if (!k.is_zero()) has_integral_ = true;
        }
        for (const auto& w : forms.weights) weight_.push_back(w.template cast<Real>());
        diag_ = forms.diagonal.template cast<Real>();
        forcing_ = forms.forcing.template cast<Real>();
        rhs_ = spec.rhs.template cast<Real>();
        k1_t0_ = spec.kernels.front().at_s_zero().template cast<Real>();
    }

    std::size_t pieces() const { return kernel_.size(); }
    Real horizon() const { return T_; }
    Real singular_coefficient() const { return a_; }
    bool has_integral_term() const { return has_integral_; }

    Real alpha(std::size_t i, Real t) const { return alpha_[i].eval(t); }
    Real alpha_prime(std::size_t i, Real t) const { return alpha_d_[i].eval(t); }
    Real alpha_slope(std::size_t i) const { return alpha_d_[i].eval(Real(0)); }

    Real lower(std::size_t piece, Real t) const { return piece == 0 ? Real(0) : alpha(piece - 1, t); }
    Real upper(std::size_t piece, Real t) const { return piece + 1 == pieces() ? t : alpha(piece, t); }

    /// Piece index for s in [0, t]; a point on a boundary belongs to the lower piece.
    std::size_t sector(Real t, Real s) const {
        for (std::size_t i = 0; i + 1 < pieces(); ++i)
            if (s <= alpha(i, t)) return i;
        return pieces() - 1;
    }

    Real kernel(std::size_t piece, Real t, Real s) const { return kernel_[piece].eval(t, s); }
    Real kernel_dt(std::size_t piece, Real t, Real s) const { return kernel_dt_[piece].eval(t, s); }
    const BivariatePolynomial<Real>& kernel_poly(std::size_t piece) const { return kernel_[piece]; }
    const BivariatePolynomial<Real>& kernel_dt_poly(std::size_t piece) const { return kernel_dt_[piece]; }
    bool kernel_dt_is_zero(std::size_t piece) const { return kernel_dt_[piece].is_zero(); }

    Real diagonal(Real t) const { return diag_.eval(t); }
    Real weight(std::size_t i, Real t) const { return weight_[i].eval(t); }

    Real checked_diagonal(Real t) const {
        const Real d = diagonal(t);
        if (d == Real(0)) throw Error(ErrorCode::SingularDiagonal, "K_n(t,t) = 0");
        return d;
    }

    /// K_n(t,t)^{-1} alpha_i'(t) (K_i - K_{i+1})(t, alpha_i(t))
    Real functional_coefficient(std::size_t i, Real t) const { return weight(i, t) / checked_diagonal(t); }

    Real A(Real t) const {
        Real sum = 0;
        for (std::size_t i = 0; i < weight_.size(); ++i) sum += weight(i, t);
        return weight_.empty() ? Real(0) : sum / checked_diagonal(t);
    }

    Real rhs(Real t) const { return rhs_.eval(t); }
    Real k1_at_s_zero(Real t) const { return k1_t0_.eval(t); }
    /// g(t) = f'(t) - a dK_1(t,0)/dt
    Real forcing(Real t) const { return forcing_.eval(t); }
    /// g(t) / K_n(t,t)
    Real fbar(Real t) const { return forcing(t) / checked_diagonal(t); }

private:
    Real T_{}, a_{};
    bool has_integral_ = false;
    std::vector<Polynomial<Real>> alpha_, alpha_d_, weight_;
    std::vector<BivariatePolynomial<Real>> kernel_, kernel_dt_;
    Polynomial<Real> diag_, forcing_, rhs_, k1_t0_;
};

struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::optional<double> witness;  // t of the first failing grid point
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
    const ValidationCheck* find(std::string_view name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.name);
        return out;
    }
};

inline ValidationReport validate(const ProblemSpec& spec, int grid_points = 2048) {
    using detail::subscript;
    ValidationReport report;
    auto add = [&](std::string name, bool ok, std::optional<double> witness = std::nullopt, std::string detail = {}) {
        report.checks.push_back({std::move(name), ok, witness, std::move(detail)});
    };
    const std::size_t n = spec.pieces();
    add("kernels.count = boundaries.count + 1", n == spec.boundaries.size() + 1);
    add("T > 0", spec.T > 0);

    for (std::size_t i = 0; i < spec.boundaries.size(); ++i) {
        const auto name = "α" + subscript(i + 1) + "′(0)";
        const Rational slope = spec.boundaries[i].slope();
        add(name + " > 0", slope > 0, std::nullopt, slope.str());
        add(name + " < 1", slope < 1, std::nullopt, slope.str());
        if (i + 1 < spec.boundaries.size()) {
            const Rational next = spec.boundaries[i + 1].slope();
            add(name + " < α" + subscript(i + 2) + "′(0)", slope < next);
        }
    }

    add("f(0) ≠ 0", spec.rhs.coeff(0) != 0, std::nullopt, spec.rhs.coeff(0).str());
    add("K₁(0,0) ≠ 0", spec.kernels.front().coeff(0, 0) != 0);

    const double T = spec.T.convert_to<double>();
    const int G = std::max(grid_points, 1);
    auto diag = spec.kernels.back().diagonal().cast<double>();
    std::vector<Polynomial<double>> alphas;
    for (const auto& b : spec.boundaries) alphas.push_back(b.polynomial().cast<double>());

    // Ordering of the curves on (0, T]: 0 < alpha_1 < ... < alpha_{n-1} < t.
    for (std::size_t i = 0; i <= spec.boundaries.size() && T > 0; ++i) {
        std::string name;
        if (spec.boundaries.empty()) break;
        if (i == 0) {
            name = "0 < α₁(t)";
        } else if (i == spec.boundaries.size()) {
            name = "α" + subscript(i) + "(t) < t";
        } else {
            name = "α" + subscript(i) + "(t) < α" + subscript(i + 1) + "(t)";
        }
        std::optional<double> witness;
        for (int k = 1; k <= G && !witness; ++k) {
            const double t = T * k / G;
            const double lo = i == 0 ? 0.0 : alphas[i - 1].eval(t);
            const double hi = i == spec.boundaries.size() ? t : alphas[i].eval(t);
            if (!(lo < hi)) witness = t;
        }
        add(name, !witness, witness);
    }

    std::optional<double> witness;
    for (int k = 0; k <= G && T > 0 && !witness; ++k) {
        const double t = T * k / G;
        if (diag.eval(t) == 0.0) witness = t;
    }
    add("K" + subscript(n) + "(t,t) ≠ 0", !witness, witness);
    return report;
}

/// K(t,s) for 0 < s < t <= T.
template <class Real = double>
Real kernel_value(const NumericModel<Real>& model, Real t, Real s) {
    if (!(s > 0 && s < t && t <= model.horizon()))
        throw Error(ErrorCode::Domain, "(t,s) outside 0 < s < t <= T");
    return model.kernel(model.sector(t, s), t, s);
}

inline double kernel_value(const ProblemSpec& spec, double t, double s) {
    return kernel_value(NumericModel<double>(spec), t, s);
}

inline std::vector<BivariatePolynomial<Rational>> kernel_time_derivative(const ProblemSpec& spec) {
    std::vector<BivariatePolynomial<Rational>> out;
    for (const auto& k : spec.kernels) out.push_back(k.d_dt());
    return out;
}

/// Signed sum_i alpha_i'(t) K_n(t,t)^{-1} (K_i - K_{i+1})(t, alpha_i(t)).
inline double A_of_t(const ProblemSpec& spec, double t) { return NumericModel<double>(spec).A(t); }

/// Constants certifying the contraction arguments of the step method and of
/// the refinement around t = 0.
struct SolverConstants {
    double target_q = 0.5;
    double q = 0.5;        // contraction bound used for the step method
    double A0 = 0;         // |A(0)|
    double supA = 0;       // sampled sup |A| on [0, h1]
    double c = 0;          // sampled sup |K_n(t,t)^{-1} K^(1)(t,s)|
    double h1 = 0;
    double h = 0;          // first interval length, 0.9 min{h1, (1-q)/c}
    double eps = 1;        // step stretch factor
    double epsBound = 0;   // sup of max(alpha_i(t)/t, |alpha_i'(t)|) on (0, Tprime]
    int Nstar = 0;
    double Tprime = 0;
    double supA_Tprime = 0;
    bool theorem1 = false;
    bool theorem2 = false;
};

inline constexpr int kMaxNstar = 12;

inline SolverConstants estimate_constants(const ProblemSpec& spec, double target_q = 0.5, int grid_points = 2048) {
    if (!(target_q > 0 && target_q < 1)) throw Error(ErrorCode::Domain, "targetQ must lie in (0,1)");
    const NumericModel<double> model(spec);
    const double T = model.horizon();
    const int G = std::max(grid_points, 8);
    const std::size_t nb = spec.boundaries.size();

    SolverConstants k;
    k.target_q = target_q;
    std::vector<double> ts(static_cast<std::size_t>(G) + 1), absA(ts.size());
    for (int i = 0; i <= G; ++i) {
        ts[static_cast<std::size_t>(i)] = T * i / G;
        absA[static_cast<std::size_t>(i)] = std::abs(model.A(ts[static_cast<std::size_t>(i)]));
    }
    k.A0 = absA[0];

    // Condition (A): prefix [0, h1] on which |A| stays below q.
    k.q = target_q;
    if (k.A0 < 1 && k.A0 > target_q) k.q = 0.5 * (k.A0 + 1);
    if (k.A0 < 1) {
        std::size_t last = 0;
        double sup = absA[0];
        while (last + 1 < ts.size() && absA[last + 1] <= k.q) {
            ++last;
            sup = std::max(sup, absA[last]);
        }
        k.h1 = ts[last];
        k.supA = sup;
    }

    // c: sup over the triangle of |K_n(t,t)^{-1} K^(1)(t,s)|.
    const int Gc = std::min(G, 256);
    constexpr int Gs = 64;
    for (int i = 1; i <= Gc; ++i) {
        const double t = T * i / Gc;
        const double d = model.checked_diagonal(t);
        for (int j = 0; j <= Gs; ++j) {
            const double s = t * j / Gs;
            k.c = std::max(k.c, std::abs(model.kernel_dt(model.sector(t, s), t, s) / d));
        }
    }
    if (k.h1 > 0) {
        const double cap = k.c > 0 ? std::min(k.h1, (1 - k.q) / k.c) : k.h1;
        k.h = 0.9 * cap;
        k.theorem1 = k.h > 0;
    }

    // Step stretch: (1 + eps) sup alpha_i'(t) <= 1 keeps perturbed arguments in history.
    double slope_sup = 0;
    for (std::size_t i = 0; i < nb; ++i)
        for (double t : ts) slope_sup = std::max(slope_sup, model.alpha_prime(i, t));
    if (slope_sup <= 0) {
        k.eps = 1;
    } else {
        const double room = 1 / slope_sup - 1;
        k.eps = room >= 1 ? 1.0 : (room > 0 ? 0.99 * room : 0.0);
    }

    // Condition (D): eps^N* sup|A| < q on a prefix (0, T'].
    std::vector<double> eps_prefix(ts.size()), supA_prefix(ts.size());
    for (std::size_t k2 = 0; k2 < ts.size(); ++k2) {
        double e = 0;
        for (std::size_t i = 0; i < nb; ++i) {
            const double ratio = ts[k2] > 0 ? model.alpha(i, ts[k2]) / ts[k2] : model.alpha_slope(i);
            e = std::max({e, ratio, std::abs(model.alpha_prime(i, ts[k2]))});
        }
        eps_prefix[k2] = k2 ? std::max(eps_prefix[k2 - 1], e) : e;
        supA_prefix[k2] = k2 ? std::max(supA_prefix[k2 - 1], absA[k2]) : absA[k2];
    }
    auto nstar_for = [&](std::size_t idx) -> int {
        const double e = eps_prefix[idx], a = supA_prefix[idx];
        if (a < target_q) return 0;
        if (e <= 0) return 0;
        if (e >= 1) return kMaxNstar + 1;
        double p = a;
        for (int N = 0; N <= kMaxNstar; ++N) {
            if (p < target_q) return N;
            p *= e;
        }
        return kMaxNstar + 1;
    };
    std::optional<std::size_t> best;
    for (std::size_t idx = ts.size(); idx-- > 1;) {
        if (nstar_for(idx) <= kMaxNstar) {
            best = idx;
            break;
        }
    }
    if (best) {
        k.Tprime = ts[*best];
        k.epsBound = eps_prefix[*best];
        k.supA_Tprime = supA_prefix[*best];
        k.Nstar = nstar_for(*best);
        k.theorem2 = true;
    } else {
        k.epsBound = eps_prefix.back();
    }

    if (!k.theorem1 && !k.theorem2)
        throw Error(ErrorCode::NoValidConstants, "|A(0)| >= 1 and condition (D) cannot be met");
    return k;
}

}  // namespace pwvie
