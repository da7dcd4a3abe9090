#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "pwvie/rational.hpp"

namespace pwvie {

/// Univariate polynomial in t, ascending coefficients, trailing zeros
/// stripped (the zero polynomial has no coefficients).
template <class S>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<S> coefficients) : c_(std::move(coefficients)) { normalize(); }

    static Polynomial constant(S value) { return Polynomial(std::vector<S>{std::move(value)}); }
    static Polynomial monomial(int degree, S value = S(1)) {
        std::vector<S> c(static_cast<std::size_t>(degree) + 1, S(0));
        c.back() = std::move(value);
        return Polynomial(std::move(c));
    }

    const std::vector<S>& coefficients() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero

    S coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : S(0);
    }

    template <class Real>
    Real eval(Real t) const {
        Real acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + convert<Real>(*it);
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<S> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * S(static_cast<long>(i));
        return Polynomial(std::move(d));
    }

    /// Drops all terms of degree greater than `order`.
    Polynomial truncated(int order) const {
        if (order < 0) return {};
        if (degree() <= order) return *this;
        return Polynomial(std::vector<S>(c_.begin(), c_.begin() + order + 1));
    }

    /// this(inner(t))
    Polynomial compose(const Polynomial& inner) const {
        Polynomial acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * inner + Polynomial::constant(*it);
        return acc;
    }

    template <class T>
    Polynomial<T> cast() const {
        std::vector<T> out;
        out.reserve(c_.size());
        for (const auto& x : c_) out.push_back(convert<T>(x));
        return Polynomial<T>(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<S> c(std::max(a.c_.size(), b.c_.size()), S(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a) {
        std::vector<S> c(a.c_);
        for (auto& x : c) x = -x;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<S> c(a.c_.size() + b.c_.size() - 1, S(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const S& k) {
        std::vector<S> c(a.c_);
        for (auto& x : c) x *= k;
        return Polynomial(std::move(c));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    template <class To, class From>
    static To convert(const From& x) {
        if constexpr (is_rational_v<From> && !is_rational_v<To>) {
            return x.template convert_to<To>();
        } else {
            return static_cast<To>(x);
        }
    }

    void normalize() {
        while (!c_.empty() && scalar_is_zero(c_.back())) c_.pop_back();
    }

    std::vector<S> c_;
};

/// Polynomial in (t, s): map (nu, mu) -> coefficient of t^nu s^mu. No stored
/// zeros.
template <class S>
class BivariatePolynomial {
public:
    using Key = std::pair<int, int>;

    BivariatePolynomial() = default;
    explicit BivariatePolynomial(std::map<Key, S> terms) : terms_(std::move(terms)) { normalize(); }

    static BivariatePolynomial constant(S value) { return BivariatePolynomial(std::map<Key, S>{{{0, 0}, std::move(value)}}); }

    const std::map<Key, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coeff(int nu, int mu) const {
        auto it = terms_.find({nu, mu});
        return it == terms_.end() ? S(0) : it->second;
    }

    template <class Real>
    Real eval(Real t, Real s) const {
        Real acc = 0;
        for (const auto& [key, c] : terms_) acc += convert<Real>(c) * ipow(t, key.first) * ipow(s, key.second);
        return acc;
    }

    /// Exact partial derivative in t.
    BivariatePolynomial d_dt() const {
        std::map<Key, S> out;
        for (const auto& [key, c] : terms_)
            if (key.first > 0) out[{key.first - 1, key.second}] = c * S(static_cast<long>(key.first));
        return BivariatePolynomial(std::move(out));
    }

    /// K(t, g(t)) as a polynomial in t.
    Polynomial<S> along(const Polynomial<S>& g) const {
        Polynomial<S> acc;
        for (const auto& [key, c] : terms_) {
            Polynomial<S> term = Polynomial<S>::monomial(key.first, c);
            for (int m = 0; m < key.second; ++m) term = term * g;
            acc = acc + term;
        }
        return acc;
    }

    Polynomial<S> diagonal() const { return along(Polynomial<S>::monomial(1)); }
    Polynomial<S> at_s_zero() const { return along(Polynomial<S>()); }

    /// Coefficients in s of K(t, s) for a fixed numeric t, ascending.
    template <class Real>
    std::vector<Real> slice_at(Real t) const {
        int max_mu = -1;
        for (const auto& [key, c] : terms_) max_mu = std::max(max_mu, key.second);
        std::vector<Real> out(static_cast<std::size_t>(max_mu + 1), Real(0));
        for (const auto& [key, c] : terms_)
            out[static_cast<std::size_t>(key.second)] += convert<Real>(c) * ipow(t, key.first);
        return out;
    }

    template <class T>
    BivariatePolynomial<T> cast() const {
        std::map<Key, T> out;
        for (const auto& [key, c] : terms_) out[key] = convert<T>(c);
        return BivariatePolynomial<T>(std::move(out));
    }

    friend bool operator==(const BivariatePolynomial& a, const BivariatePolynomial& b) {
        return a.terms_ == b.terms_;
    }

private:
    template <class To, class From>
    static To convert(const From& x) {
        if constexpr (is_rational_v<From> && !is_rational_v<To>) {
            return x.template convert_to<To>();
        } else {
            return static_cast<To>(x);
        }
    }

    template <class Real>
    static Real ipow(Real x, int n) {
        Real r = 1;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }

    void normalize() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (scalar_is_zero(it->second)) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::map<Key, S> terms_;
};

/// Boundary curve s = alpha(t) with alpha(0) = 0, stored as the coefficients
/// of t, t^2, ...
class BoundaryFunction {
public:
    BoundaryFunction() = default;
    explicit BoundaryFunction(std::vector<Rational> coefficients_from_t) {
        std::vector<Rational> c;
        c.reserve(coefficients_from_t.size() + 1);
        c.emplace_back(0);
        for (auto& x : coefficients_from_t) c.push_back(std::move(x));
        poly_ = Polynomial<Rational>(std::move(c));
    }

    const Polynomial<Rational>& polynomial() const { return poly_; }

    /// alpha'(0)
    Rational slope() const { return poly_.coeff(1); }

    bool is_linear() const { return poly_.degree() <= 1; }

    template <class Real>
    Real value(Real t) const {
        return poly_.eval(t);
    }

private:
    Polynomial<Rational> poly_;
};

}  // namespace pwvie
