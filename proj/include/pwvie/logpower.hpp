#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pwvie/affine.hpp"
#include "pwvie/error.hpp"
#include "pwvie/polynomial.hpp"
#include "pwvie/rational.hpp"

namespace pwvie {

/// Finite sum  sum c_{jk} t^j (ln t)^k  with 0 <= j <= order. Coefficients
/// are exact rationals, floating scalars, or AffineValue over either.
template <class C>
class LogPowerPolynomial {
public:
    using Key = std::pair<int, int>;  // (power of t, power of ln t)
    using Scalar = scalar_of_t<C>;

    explicit LogPowerPolynomial(int order = 0) : order_(order) {}
    LogPowerPolynomial(int order, std::map<Key, C> terms) : order_(order) {
        for (auto& [key, c] : terms) add_term(key.first, key.second, std::move(c));
    }

    static LogPowerPolynomial monomial(int order, int j, int k, C c) {
        LogPowerPolynomial p(order);
        p.add_term(j, k, std::move(c));
        return p;
    }

    template <class S>
    static LogPowerPolynomial from_polynomial(const Polynomial<S>& poly, int order) {
        LogPowerPolynomial p(order);
        for (int j = 0; j <= poly.degree(); ++j) p.add_term(j, 0, C(scalar_from<S>(poly.coeff(j))));
        return p;
    }

    int order() const { return order_; }
    const std::map<Key, C>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    C coeff(int j, int k) const {
        auto it = terms_.find({j, k});
        return it == terms_.end() ? C() : it->second;
    }

    int max_log_degree() const {
        int m = -1;
        for (const auto& [key, c] : terms_) m = std::max(m, key.second);
        return m;
    }
    int max_power() const { return terms_.empty() ? -1 : terms_.rbegin()->first.first; }

    /// Adds c t^j ln^k t; silently dropped when j exceeds the order.
    void add_term(int j, int k, C c) {
        if (j < 0 || k < 0) throw Error(ErrorCode::UnsupportedInput, "negative exponent in log-power term");
        if (j > order_) return;
        auto [it, inserted] = terms_.try_emplace({j, k}, std::move(c));
        if (!inserted) it->second += c;
        if (scalar_is_zero(it->second)) terms_.erase(it);
    }

    /// Same terms under a new order (dropping those beyond it).
    LogPowerPolynomial with_order(int order) const {
        LogPowerPolynomial p(order);
        for (const auto& [key, c] : terms_) p.add_term(key.first, key.second, c);
        return p;
    }

    template <class Real>
    Real evaluate(Real t) const {
        using std::log;
        if (!(t > 0)) throw Error(ErrorCode::Domain, "log-power polynomial evaluated at t <= 0");
        const Real lt = log(t);
        Real sum = 0;
        for (const auto& [key, c] : terms_) sum += to<Real>(c) * pow_int(t, key.first) * pow_int(lt, key.second);
        return sum;
    }

    template <class Real>
    Real evaluate(Real t, const std::map<int, Real>& params) const {
        using std::log;
        if (!(t > 0)) throw Error(ErrorCode::Domain, "log-power polynomial evaluated at t <= 0");
        const Real lt = log(t);
        Real sum = 0;
        for (const auto& [key, c] : terms_) {
            Real value;
            if constexpr (std::is_same_v<C, AffineValue<Scalar>>) {
                value = c.evaluate(params);
            } else {
                value = to<Real>(c);
            }
            sum += value * pow_int(t, key.first) * pow_int(lt, key.second);
        }
        return sum;
    }

    /// Stable "(j,k): coeff" listing ordered by (j,k).
    std::string debug_string() const {
        std::ostringstream os;
        os.precision(17);
        for (const auto& [key, c] : terms_) {
            os << "(" << key.first << "," << key.second << "): ";
            write(os, c);
            os << "\n";
        }
        return os.str();
    }

    LogPowerPolynomial& operator+=(const LogPowerPolynomial& o) {
        if (o.order_ < order_) *this = with_order(o.order_);
        for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
        return *this;
    }
    friend LogPowerPolynomial operator+(LogPowerPolynomial a, const LogPowerPolynomial& b) { return a += b; }
    friend LogPowerPolynomial operator-(const LogPowerPolynomial& a) {
        LogPowerPolynomial out(a.order_);
        for (const auto& [key, c] : a.terms_) out.terms_.emplace(key, -c);
        return out;
    }
    friend LogPowerPolynomial operator-(const LogPowerPolynomial& a, const LogPowerPolynomial& b) { return a + (-b); }
    friend bool operator==(const LogPowerPolynomial& a, const LogPowerPolynomial& b) {
        return a.order_ == b.order_ && a.terms_ == b.terms_;
    }

    template <class D>
    LogPowerPolynomial scaled(const D& k) const {
        LogPowerPolynomial out(order_);
        for (const auto& [key, c] : terms_) out.add_term(key.first, key.second, c * k);
        return out;
    }

private:
    template <class From>
    static Scalar scalar_from(const From& x) {
        if constexpr (is_rational_v<From>) {
            return scalar_from_rational<Scalar>(x);
        } else {
            return static_cast<Scalar>(x);
        }
    }

    template <class Real, class From>
    static Real to(const From& x) {
        if constexpr (is_rational_v<From>) {
            return x.template convert_to<Real>();
        } else {
            return static_cast<Real>(x);
        }
    }

    template <class Real>
    static Real pow_int(Real x, int n) {
        Real r = 1;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }

    template <class V>
    static void write(std::ostream& os, const V& c) {
        if constexpr (std::is_same_v<V, AffineValue<Scalar>>) {
            write(os, c.constant());
            for (const auto& [id, v] : c.linear()) {
                os << " + (";
                write(os, v);
                os << ")*c" << id + 1;
            }
        } else {
            os << c;
        }
    }

    int order_;
    std::map<Key, C> terms_;
};

template <class C>
LogPowerPolynomial<C> add(const LogPowerPolynomial<C>& p, const LogPowerPolynomial<C>& q) {
    return p + q;
}

template <class C, class D>
LogPowerPolynomial<C> scale(const LogPowerPolynomial<C>& p, const D& k) {
    return p.scaled(k);
}

/// Product truncated to min(order(p), order(q)).
template <class C, class D>
LogPowerPolynomial<C> multiply(const LogPowerPolynomial<C>& p, const LogPowerPolynomial<D>& q) {
    const int order = std::min(p.order(), q.order());
    LogPowerPolynomial<C> out(order);
    for (const auto& [kp, cp] : p.terms())
        for (const auto& [kq, cq] : q.terms())
            if (kp.first + kq.first <= order) out.add_term(kp.first + kq.first, kp.second + kq.second, cp * cq);
    return out;
}

/// Antiderivative vanishing at 0+, term by term:
///   int t^j ln^k t dt = t^{j+1} sum_{s=0}^{k} (-1)^s k!/(k-s)! / (j+1)^{s+1} ln^{k-s} t.
/// The order is kept, so terms landing above it are dropped.
template <class C>
LogPowerPolynomial<C> integrate_from_zero(const LogPowerPolynomial<C>& p) {
    using S = scalar_of_t<C>;
    LogPowerPolynomial<C> out(p.order());
    for (const auto& [key, c] : p.terms()) {
        const auto [j, k] = key;
        Rational falling = 1;  // k (k-1) ... (k-s+1)
        Rational denom = j + 1;
        for (int s = 0; s <= k; ++s) {
            Rational factor = falling / denom;
            if (s % 2) factor = -factor;
            out.add_term(j + 1, k - s, c * scalar_from_rational<S>(factor));
            falling *= (k - s);
            denom *= (j + 1);
        }
    }
    return out;
}

/// d/dt term by term; a pure log term (j = 0, k > 0) would produce 1/t and
/// is rejected.
template <class C>
LogPowerPolynomial<C> differentiate(const LogPowerPolynomial<C>& p) {
    using S = scalar_of_t<C>;
    LogPowerPolynomial<C> out(p.order());
    for (const auto& [key, c] : p.terms()) {
        const auto [j, k] = key;
        if (j == 0) {
            if (k > 0) throw Error(ErrorCode::NonPolynomialDerivative, "d/dt ln^k t leaves the representation");
            continue;
        }
        out.add_term(j - 1, k, c * scalar_from_rational<S>(Rational(j)));
        if (k > 0) out.add_term(j - 1, k - 1, c * scalar_from_rational<S>(Rational(k)));
    }
    return out;
}

template <class C, class Real>
Real evaluate(const LogPowerPolynomial<C>& p, Real t) {
    return p.evaluate(t);
}

/// p(alpha(t)) expanded to order N, using
///   ln alpha(t) = ln t + ln alpha'(0) + ln(1 + u(t)),  u = alpha(t)/(alpha'(0) t) - 1,
/// with ln(1+u) replaced by its series truncated at t^N.
template <class C>
LogPowerPolynomial<C> substitute_boundary(const LogPowerPolynomial<C>& p, const BoundaryFunction& alpha, int N) {
    using S = scalar_of_t<C>;
    const Rational beta = alpha.slope();
    if (beta <= 0) throw Error(ErrorCode::InvalidBoundary, "alpha'(0) must be positive");
    const auto& ap = alpha.polynomial();

    std::vector<Rational> uc(static_cast<std::size_t>(std::max(ap.degree(), 1)), Rational(0));
    for (int k = 1; k < ap.degree(); ++k) uc[static_cast<std::size_t>(k)] = ap.coeff(k + 1) / beta;
    const Polynomial<Rational> u(uc);

    // ln(1 + u) = sum_m (-1)^{m+1} u^m / m, exact through t^N.
    Polynomial<Rational> log_series, upow = Polynomial<Rational>::constant(1);
    if (!u.is_zero()) {
        for (int m = 1; m <= N; ++m) {
            upow = (upow * u).truncated(N);
            if (upow.is_zero()) break;
            log_series = log_series + upow * Rational(m % 2 ? 1 : -1, m);
        }
    }

    int max_j = 0, max_k = 0;
    for (const auto& [key, c] : p.terms()) {
        max_j = std::max(max_j, key.first);
        max_k = std::max(max_k, key.second);
    }

    std::vector<LogPowerPolynomial<S>> alpha_pow{LogPowerPolynomial<S>::monomial(N, 0, 0, S(1))};
    {
        Polynomial<Rational> acc = Polynomial<Rational>::constant(1);
        for (int j = 1; j <= max_j; ++j) {
            acc = (acc * ap).truncated(N);
            alpha_pow.push_back(LogPowerPolynomial<S>::from_polynomial(acc, N));
        }
    }
    std::vector<LogPowerPolynomial<S>> log_pow{LogPowerPolynomial<S>::monomial(N, 0, 0, S(1))};
    if (max_k > 0) {
        auto ln_alpha = LogPowerPolynomial<S>::from_polynomial(log_series, N);
        ln_alpha.add_term(0, 1, S(1));
        ln_alpha.add_term(0, 0, scalar_log<S>(beta));
        for (int k = 1; k <= max_k; ++k) log_pow.push_back(multiply(log_pow.back(), ln_alpha));
    }

    LogPowerPolynomial<C> out(N);
    for (const auto& [key, c] : p.terms()) {
        const auto& basis = key.second == 0 ? alpha_pow[static_cast<std::size_t>(key.first)]
                                            : multiply(alpha_pow[static_cast<std::size_t>(key.first)],
                                                       log_pow[static_cast<std::size_t>(key.second)]);
        for (const auto& [bk, bc] : basis.terms()) out.add_term(bk.first, bk.second, c * bc);
    }
    return out;
}

}  // namespace pwvie
