#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "pwvie/error.hpp"

namespace pwvie {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_rational_v = std::is_same_v<T, Rational>;

/// Parses "p/q", an integer, or a decimal literal such as "-0.25" or "1e-3"
/// into an exact rational. Returns nullopt on anything else.
inline std::optional<Rational> try_parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) return std::nullopt;

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = try_parse_rational(text.substr(0, slash));
        auto den = try_parse_rational(text.substr(slash + 1));
        if (!num || !den || *den == 0) return std::nullopt;
        return *num / *den;
    }

    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    boost::multiprecision::cpp_int mantissa = 0;
    long exponent10 = 0;
    bool digits = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char ch = text[pos];
        if (ch >= '0' && ch <= '9') {
            mantissa = mantissa * 10 + (ch - '0');
            if (seen_point) --exponent10;
            digits = true;
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!digits) return std::nullopt;
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') return std::nullopt;
        ++pos;
        long e = 0;
        auto rest = text.substr(pos);
        if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e);
        if (ec != std::errc{} || ptr != rest.data() + rest.size()) return std::nullopt;
        exponent10 += e;
    }
    if (exponent10 > 4000 || exponent10 < -4000) return std::nullopt;
    Rational value(mantissa);
    boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                      static_cast<unsigned>(std::labs(exponent10)));
    if (exponent10 >= 0) {
        value *= Rational(scale);
    } else {
        value /= Rational(scale);
    }
    return negative ? Rational(-value) : value;
}

/// Exact rational for the shortest decimal that round-trips `x`, so that a
/// JSON literal like 0.1 becomes 1/10 rather than its binary approximation.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw Error(ErrorCode::UnsupportedInput, "non-finite coefficient");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    auto parsed = try_parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
    if (ec != std::errc{} || !parsed) throw Error(ErrorCode::UnsupportedInput, "cannot represent coefficient");
    return *parsed;
}

inline std::string to_string(const Rational& r) { return r.str(); }

template <class Real>
Real to_real(const Rational& r) {
    return r.convert_to<Real>();
}

// Scalar helpers shared by the exact and floating code paths.

template <class S>
S scalar_from_rational(const Rational& r) {
    if constexpr (is_rational_v<S>) {
        return r;
    } else {
        return r.convert_to<S>();
    }
}

template <class S>
bool scalar_is_zero(const S& x) {
    return x == S(0);
}

template <class S>
double scalar_to_double(const S& x) {
    if constexpr (is_rational_v<S>) {
        return x.template convert_to<double>();
    } else {
        return static_cast<double>(x);
    }
}

/// ln of a positive rational in scalar type S. The exact path can only
/// represent ln 1 = 0; anything else is irrational.
template <class S>
S scalar_log(const Rational& positive) {
    if constexpr (is_rational_v<S>) {
        if (positive == 1) return Rational(0);
        throw Error(ErrorCode::UnsupportedInput,
                    "ln(" + positive.str() + ") is irrational; use the floating path");
    } else {
        return std::log(positive.convert_to<S>());
    }
}

}  // namespace pwvie
