#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwvie/affine.hpp"
#include "pwvie/characteristic.hpp"
#include "pwvie/error.hpp"
#include "pwvie/logpower.hpp"
#include "pwvie/model.hpp"

namespace pwvie {

/// Polynomial in z = ln t with affine coefficients, ascending powers.
template <class S>
class ZPolynomial {
public:
    ZPolynomial() = default;
    explicit ZPolynomial(std::vector<AffineValue<S>> c) : c_(std::move(c)) { normalize(); }

    const std::vector<AffineValue<S>>& coefficients() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    AffineValue<S> coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : AffineValue<S>();
    }

    template <class T>
    ZPolynomial<T> cast() const {
        std::vector<AffineValue<T>> out;
        for (const auto& v : c_) out.push_back(v.template cast<T>());
        return ZPolynomial<T>(std::move(out));
    }

    friend ZPolynomial operator+(const ZPolynomial& a, const ZPolynomial& b) {
        std::vector<AffineValue<S>> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return ZPolynomial(std::move(c));
    }
    friend ZPolynomial operator-(const ZPolynomial& a) {
        std::vector<AffineValue<S>> c;
        for (const auto& v : a.c_) c.push_back(-v);
        return ZPolynomial(std::move(c));
    }
    friend bool operator==(const ZPolynomial& a, const ZPolynomial& b) { return a.c_ == b.c_; }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<AffineValue<S>> c_;
};

/// L[p](z) = c0 p(z) + sum_i w_i p(z + a_i). A shift the scalar type cannot
/// represent (ln of a rational != 1 on the exact path) is left empty; it is
/// only needed once p depends on z.
template <class S>
struct DifferenceOperator {
    struct Shift {
        S weight;
        std::optional<S> offset;
    };
    S constant_weight{0};
    std::vector<Shift> shifts;

    /// D_0 = c0 + sum w_i (= B(j)), D_r = sum w_i a_i^r (= B^(r)(j)).
    S derivative(int r) const {
        S sum = r == 0 ? constant_weight : S(0);
        for (const auto& sh : shifts) {
            if (r == 0) {
                sum += sh.weight;
                continue;
            }
            if (scalar_is_zero(sh.weight)) continue;
            if (!sh.offset) throw Error(ErrorCode::UnsupportedInput, "irrational shift on the exact path");
            S p = sh.weight;
            for (int e = 0; e < r; ++e) p *= *sh.offset;
            sum += p;
        }
        return sum;
    }

    /// Magnitude used to decide whether D_r vanishes in floating arithmetic.
    double scale(int r) const {
        double s = r == 0 ? std::abs(scalar_to_double(constant_weight)) : 0.0;
        for (const auto& sh : shifts) {
            double p = std::abs(scalar_to_double(sh.weight));
            for (int e = 0; e < r && sh.offset; ++e) p *= std::abs(scalar_to_double(*sh.offset));
            s += p;
        }
        return s;
    }

    ZPolynomial<S> apply(const ZPolynomial<S>& p) const {
        const int d = p.degree();
        std::vector<AffineValue<S>> out(static_cast<std::size_t>(std::max(d + 1, 0)));
        std::vector<S> D;
        for (int r = 0; r <= d; ++r) D.push_back(derivative(r));
        for (int e = 0; e <= d; ++e) {
            AffineValue<S> acc;
            for (int k = e; k <= d; ++k)
                acc += p.coeff(k) * (binomial(k, k - e) * D[static_cast<std::size_t>(k - e)]);
            out[static_cast<std::size_t>(e)] = acc;
        }
        return ZPolynomial<S>(std::move(out));
    }

    static S binomial(int n, int k) {
        Rational b = 1;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return scalar_from_rational<S>(b);
    }
};

/// Leading operator of the order-j equation: weights beta_i^{1+j} (K_i - K_{i+1})(0,0),
/// shifts ln beta_i, constant weight K_n(0,0).
template <class S>
DifferenceOperator<S> order_operator(const ProblemSpec& spec, int j) {
    const CharacteristicData d(spec);
    DifferenceOperator<S> L;
    L.constant_weight = scalar_from_rational<S>(d.constant);
    for (std::size_t i = 0; i < d.slopes.size(); ++i) {
        Rational w = d.jumps[i];
        for (int e = 0; e <= j; ++e) w *= d.slopes[i];
        typename DifferenceOperator<S>::Shift sh{scalar_from_rational<S>(w), std::nullopt};
        if constexpr (is_rational_v<S>) {
            if (d.slopes[i] == 1) sh.offset = Rational(0);
        } else {
            sh.offset = scalar_log<S>(d.slopes[i]);
        }
        L.shifts.push_back(sh);
    }
    return L;
}

inline constexpr double kDifferenceTolerance = 1e-10;

/// Polynomial solution p of L[p] = rhs when D_0 = ... = D_{m-1} = 0 and
/// D_m != 0. The coefficients of z^0..z^{m-1} become free parameters with ids
/// first_param_id, first_param_id + 1, ...
template <class S>
ZPolynomial<S> solve_difference_equation(const DifferenceOperator<S>& L, const ZPolynomial<S>& rhs,
                                         int multiplicity, int first_param_id = 0,
                                         double tol = kDifferenceTolerance) {
    const int m = multiplicity;
    if (m < 0) throw Error(ErrorCode::Domain, "negative multiplicity");
    auto vanishes = [&](int r) {
        const S v = L.derivative(r);
        if constexpr (is_rational_v<S>) {
            return v == 0;
        } else {
            return std::abs(scalar_to_double(v)) <= tol * std::max(1.0, L.scale(r));
        }
    };
    for (int r = 0; r < m; ++r)
        if (!vanishes(r))
            throw Error(ErrorCode::MultiplicityMismatch,
                        "D_" + std::to_string(r) + " != 0 but multiplicity " + std::to_string(m) + " declared");
    if (vanishes(m))
        throw Error(ErrorCode::MultiplicityMismatch,
                    "D_" + std::to_string(m) + " = 0: root multiplicity exceeds " + std::to_string(m));

    const int d = rhs.degree();
    std::vector<AffineValue<S>> p(static_cast<std::size_t>(std::max(d + m + 1, m)));
    std::vector<S> D;
    for (int r = 0; r <= d + m; ++r) D.push_back(r < m ? S(0) : L.derivative(r));

    for (int e = d; e >= 0; --e) {
        AffineValue<S> acc = rhs.coeff(e);
        for (int k = e + m + 1; k <= d + m; ++k)
            acc -= p[static_cast<std::size_t>(k)] * (DifferenceOperator<S>::binomial(k, k - e) *
                                                     D[static_cast<std::size_t>(k - e)]);
        p[static_cast<std::size_t>(e + m)] = acc / (DifferenceOperator<S>::binomial(e + m, m) * D[static_cast<std::size_t>(m)]);
    }
    for (int r = 0; r < m; ++r) p[static_cast<std::size_t>(r)] += AffineValue<S>::parameter(first_param_id + r);
    return ZPolynomial<S>(std::move(p));
}

/// x̂(t) = sum_j x_j(ln t) t^j.
template <class S>
struct AsymptoticExpansion {
    int order = 0;
    std::vector<ZPolynomial<S>> coefficients;
    std::vector<int> free_parameters;

    LogPowerPolynomial<AffineValue<S>> as_logpower(int truncation) const {
        LogPowerPolynomial<AffineValue<S>> p(truncation);
        for (std::size_t j = 0; j < coefficients.size(); ++j)
            for (int k = 0; k <= coefficients[j].degree(); ++k)
                p.add_term(static_cast<int>(j), k, coefficients[j].coeff(k));
        return p;
    }

    template <class Real>
    Real evaluate(const std::map<int, Real>& params, Real t) const {
        using std::log;
        if (!(t > 0)) throw Error(ErrorCode::Domain, "x̂ evaluated at t <= 0");
        const Real z = log(t);
        Real sum = 0, tj = 1;
        for (const auto& xj : coefficients) {
            Real inner = 0;
            for (int k = xj.degree(); k >= 0; --k) inner = inner * z + xj.coeff(k).evaluate(params);
            sum += inner * tj;
            tj *= t;
        }
        return sum;
    }

    template <class T>
    AsymptoticExpansion<T> cast() const {
        AsymptoticExpansion<T> out;
        out.order = order;
        out.free_parameters = free_parameters;
        for (const auto& c : coefficients) out.coefficients.push_back(c.template cast<T>());
        return out;
    }
};

/// Order-zero forcing f'(0) - (f(0)/K_1(0,0)) dK_1(t,0)/dt at t = 0.
inline Rational build_rhs0(const ProblemSpec& spec) { return derive_forms(spec).forcing.coeff(0); }

/// Log-power expansion of F(x) - g through t^order, for x given as a
/// log-power polynomial (possibly with symbolic parameters).
template <class C>
LogPowerPolynomial<C> operator_series(const ProblemSpec& spec, const EquationForms& forms,
                                      const LogPowerPolynomial<C>& x, int order) {
    using S = scalar_of_t<C>;
    const auto xs = x.with_order(order);
    auto poly = [&](const Polynomial<Rational>& p) { return LogPowerPolynomial<S>::from_polynomial(p, order); };

    LogPowerPolynomial<C> F = multiply(xs, poly(forms.diagonal));
    for (std::size_t i = 0; i < spec.boundaries.size(); ++i)
        F += multiply(substitute_boundary(xs, spec.boundaries[i], order), poly(forms.weights[i]));

    std::map<int, LogPowerPolynomial<C>> antiderivative;  // int_0^t s^mu x(s) ds
    const std::size_t n = spec.pieces();
    for (std::size_t piece = 0; piece < n; ++piece) {
        for (const auto& [key, c] : forms.kernel_dt[piece].terms()) {
            const auto [nu, mu] = key;
            auto it = antiderivative.find(mu);
            if (it == antiderivative.end())
                it = antiderivative
                         .emplace(mu, integrate_from_zero(multiply(
                                          xs, LogPowerPolynomial<S>::monomial(order, mu, 0, S(1)))))
                         .first;
            const auto& G = it->second;
            LogPowerPolynomial<C> segment =
                piece + 1 == n ? G : substitute_boundary(G, spec.boundaries[piece], order);
            if (piece > 0) segment = segment - substitute_boundary(G, spec.boundaries[piece - 1], order);
            F += multiply(segment, LogPowerPolynomial<S>::monomial(order, nu, 0, scalar_from_rational<S>(c)));
        }
    }
    F += -LogPowerPolynomial<C>::from_polynomial(forms.forcing, order);
    return F;
}

/// Forcing P_j of the order-j equation  L_j[x_j] + P_j = 0: the t^j
/// coefficient of F(x̂_{j-1}) - g.
template <class S>
ZPolynomial<S> expand_operator(const ProblemSpec& spec, const EquationForms& forms,
                               const std::vector<ZPolynomial<S>>& partial, int j, int log_degree_cap = -1) {
    AsymptoticExpansion<S> head;
    head.coefficients.assign(partial.begin(), partial.begin() + std::min<std::ptrdiff_t>(j, partial.size()));
    const auto residual = operator_series(spec, forms, head.as_logpower(j), j);
    if (log_degree_cap >= 0 && residual.max_log_degree() > log_degree_cap)
        throw Error(ErrorCode::InternalConsistency, "log degree " + std::to_string(residual.max_log_degree()) +
                                                        " exceeds bound " + std::to_string(log_degree_cap));
    std::vector<AffineValue<S>> out;
    for (int k = 0; k <= std::max(residual.max_log_degree(), 0); ++k) out.push_back(residual.coeff(j, k));
    return ZPolynomial<S>(std::move(out));
}

template <class S>
AsymptoticExpansion<S> compute_expansion(const ProblemSpec& spec, const CharacteristicReport& report, int N) {
    const auto forms = derive_forms(spec);
    AsymptoticExpansion<S> out;
    out.order = N;
    int next_param = 0, multiplicity_sum = 0;
    for (int j = 0; j <= N; ++j) {
        const int m = report.multiplicity(j);
        const auto P = expand_operator<S>(spec, forms, out.coefficients, j, multiplicity_sum + 1);
        multiplicity_sum += m;
        auto xj = solve_difference_equation(order_operator<S>(spec, j), -P, m, next_param);
        if (xj.degree() > multiplicity_sum)
            throw Error(ErrorCode::InternalConsistency, "deg x_" + std::to_string(j) + " exceeds multiplicity sum");
        for (int r = 0; r < m; ++r) out.free_parameters.push_back(next_param + r);
        next_param += m;
        out.coefficients.push_back(std::move(xj));
    }
    return out;
}

/// Asymptotic approximation of the regular part. The regular case is solved
/// over exact rationals; irregular points need ln alpha_i'(0) and run in
/// double.
struct AsymptoticSolution {
    int order = 0;
    AsymptoticExpansion<double> numeric;
    std::optional<AsymptoticExpansion<Rational>> exact;
    CharacteristicReport characteristic;
    std::vector<std::string> warnings;

    const std::vector<int>& free_parameters() const { return numeric.free_parameters; }

    template <class Real>
    AsymptoticExpansion<Real> expansion_as() const {
        return exact ? exact->template cast<Real>() : numeric.template cast<Real>();
    }
};

inline AsymptoticSolution compute_asymptotics(const ProblemSpec& spec, int N) {
    if (N < 0) throw Error(ErrorCode::Domain, "order must be >= 0");
    AsymptoticSolution sol;
    sol.order = N;
    sol.characteristic = find_integer_roots(spec, N);
    sol.warnings = sol.characteristic.warnings;
    if (sol.characteristic.regular_through(N)) {
        sol.exact = compute_expansion<Rational>(spec, sol.characteristic, N);
        sol.numeric = sol.exact->cast<double>();
    } else {
        sol.numeric = compute_expansion<double>(spec, sol.characteristic, N);
    }
    return sol;
}

inline std::string parameter_name(int id) { return "c" + std::to_string(id + 1); }

inline std::optional<int> parameter_id(const std::string& name) {
    if (name.size() < 2 || name[0] != 'c') return std::nullopt;
    int v = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
        v = v * 10 + (name[i] - '0');
    }
    if (v < 1) return std::nullopt;
    return v - 1;
}

inline double eval_asymptotic(const AsymptoticSolution& asym, const std::map<int, double>& params, double t) {
    return asym.numeric.evaluate(params, t);
}

namespace detail {

inline std::string format_number(const Rational& r) { return r.str(); }
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
template <class S>
bool is_negative(const S& x) {
    return x < S(0);
}

template <class S>
std::string format_affine(const AffineValue<S>& v, bool& negative) {
    negative = false;
    if (v.is_constant()) {
        negative = is_negative(v.constant());
        return format_number(negative ? S(-v.constant()) : v.constant());
    }
    if (scalar_is_zero(v.constant()) && v.linear().size() == 1) {
        const auto& [id, c] = *v.linear().begin();
        if (c == S(1)) return parameter_name(id);
        if (c == S(-1)) {
            negative = true;
            return parameter_name(id);
        }
    }
    std::string s = "(";
    bool first = true;
    if (!scalar_is_zero(v.constant())) {
        s += format_number(v.constant());
        first = false;
    }
    for (const auto& [id, c] : v.linear()) {
        const bool neg = is_negative(c);
        const S mag = neg ? S(-c) : c;
        s += first ? (neg ? "−" : "") : (neg ? " − " : " + ");
        if (!(mag == S(1))) s += format_number(mag) + "·";
        s += parameter_name(id);
        first = false;
    }
    return s + ")";
}

inline std::string format_monomial(int j, int k) {
    std::string s;
    if (j == 1) s = "t";
    if (j > 1) s = "t^" + std::to_string(j);
    if (k > 0) {
        if (!s.empty()) s += "·";
        s += k == 1 ? "ln t" : "ln^" + std::to_string(k) + " t";
    }
    return s;
}

}  // namespace detail

/// Human-readable form, e.g. "x̂(t) = c1 − 1.4426950408889634·ln t".
template <class S>
std::string pretty(const AsymptoticExpansion<S>& e) {
    std::string out = "x̂(t) =";
    bool first = true;
    for (std::size_t j = 0; j < e.coefficients.size(); ++j) {
        for (int k = 0; k <= e.coefficients[j].degree(); ++k) {
            const auto c = e.coefficients[j].coeff(k);
            if (c.is_zero()) continue;
            bool negative = false;
            std::string coeff = detail::format_affine(c, negative);
            const std::string mono = detail::format_monomial(static_cast<int>(j), k);
            std::string term;
            if (mono.empty()) {
                term = coeff;
            } else if (c.is_constant() && coeff == "1") {
                term = mono;
            } else {
                term = coeff + "·" + mono;
            }
            if (first) {
                out += negative ? " −" : " ";
                out += term;
            } else {
                out += negative ? " − " : " + ";
                out += term;
            }
            first = false;
        }
    }
    if (first) out += " 0";
    return out;
}

inline std::string pretty(const AsymptoticSolution& sol) {
    return sol.exact ? pretty(*sol.exact) : pretty(sol.numeric);
}

}  // namespace pwvie
