#pragma once

#include <map>
#include <string>

#include "pwvie/error.hpp"
#include "pwvie/rational.hpp"

namespace pwvie {

/// constant + sum_p coeff_p * c_p over free parameters c_p (ids are
/// 0-based; parameter id p is displayed as "c{p+1}").
template <class S>
class AffineValue {
public:
    AffineValue() : constant_(0) {}
    AffineValue(S constant) : constant_(std::move(constant)) {}  // NOLINT: implicit from scalar

    static AffineValue parameter(int id, S coeff = S(1)) {
        AffineValue v;
        if (!scalar_is_zero(coeff)) v.linear_[id] = std::move(coeff);
        return v;
    }

    const S& constant() const { return constant_; }
    const std::map<int, S>& linear() const { return linear_; }
    bool is_constant() const { return linear_.empty(); }
    bool is_zero() const { return linear_.empty() && scalar_is_zero(constant_); }

    S coefficient(int id) const {
        auto it = linear_.find(id);
        return it == linear_.end() ? S(0) : it->second;
    }

    /// Largest |coefficient| over constant and linear parts, as a double.
    double magnitude() const {
        double m = std::abs(scalar_to_double(constant_));
        for (const auto& [id, c] : linear_) m = std::max(m, std::abs(scalar_to_double(c)));
        return m;
    }

    template <class Real>
    Real evaluate(const std::map<int, Real>& params) const {
        Real v = scalar_to<Real>(constant_);
        for (const auto& [id, c] : linear_) {
            auto it = params.find(id);
            if (it == params.end())
                throw Error(ErrorCode::MissingParameter, "parameter c" + std::to_string(id + 1) + " is unbound");
            v += scalar_to<Real>(c) * it->second;
        }
        return v;
    }

    /// Substitutes values for the parameters that appear in `params` and keeps
    /// the rest symbolic.
    AffineValue bind(const std::map<int, S>& params) const {
        AffineValue out(constant_);
        for (const auto& [id, c] : linear_) {
            auto it = params.find(id);
            if (it == params.end()) {
                out.linear_[id] = c;
            } else {
                out.constant_ += c * it->second;
            }
        }
        return out;
    }

    template <class T>
    AffineValue<T> cast() const {
        AffineValue<T> out(scalar_to<T>(constant_));
        for (const auto& [id, c] : linear_) out = out + AffineValue<T>::parameter(id, scalar_to<T>(c));
        return out;
    }

    AffineValue& operator+=(const AffineValue& o) {
        constant_ += o.constant_;
        for (const auto& [id, c] : o.linear_) {
            auto& slot = linear_[id];
            slot += c;
            if (scalar_is_zero(slot)) linear_.erase(id);
        }
        return *this;
    }
    AffineValue& operator-=(const AffineValue& o) { return *this += -o; }
    AffineValue& operator*=(const S& k) {
        if (scalar_is_zero(k)) return *this = AffineValue();
        constant_ *= k;
        for (auto& [id, c] : linear_) c *= k;
        return *this;
    }

    friend AffineValue operator+(AffineValue a, const AffineValue& b) { return a += b; }
    friend AffineValue operator-(AffineValue a, const AffineValue& b) { return a -= b; }
    friend AffineValue operator-(const AffineValue& a) {
        AffineValue out(-a.constant_);
        for (const auto& [id, c] : a.linear_) out.linear_[id] = -c;
        return out;
    }
    friend AffineValue operator*(AffineValue a, const S& k) { return a *= k; }
    friend AffineValue operator*(const S& k, AffineValue a) { return a *= k; }
    friend AffineValue operator/(AffineValue a, const S& k) {
        a.constant_ /= k;
        for (auto& [id, c] : a.linear_) c /= k;
        return a;
    }
    friend bool operator==(const AffineValue& a, const AffineValue& b) {
        return a.constant_ == b.constant_ && a.linear_ == b.linear_;
    }

private:
    template <class To, class From>
    static To scalar_to(const From& x) {
        if constexpr (is_rational_v<From> && !is_rational_v<To>) {
            return x.template convert_to<To>();
        } else {
            return static_cast<To>(x);
        }
    }

    S constant_;
    std::map<int, S> linear_;
};

template <class S>
bool scalar_is_zero(const AffineValue<S>& v) {
    return v.is_zero();
}

template <class C>
struct scalar_of {
    using type = C;
};
template <class S>
struct scalar_of<AffineValue<S>> {
    using type = S;
};
template <class C>
using scalar_of_t = typename scalar_of<C>::type;

}  // namespace pwvie
