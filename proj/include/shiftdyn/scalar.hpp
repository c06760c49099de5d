#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace shiftdyn {

using Index = std::int64_t;

/// Arbitrary-precision rational, the exact-arithmetic scalar backend.
using Rational = boost::multiprecision::cpp_rational;

inline double approx(double x) { return x; }
inline double approx(const Rational& x) { return x.convert_to<double>(); }

// ---------------------------------------------------------------------------
// scalar traits: the library is generic over S in {double, Rational,
// std::complex<double>}. real_t is the type carrying magnitudes, norms and
// certified bounds.
// ---------------------------------------------------------------------------

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    using real_t = double;
    static constexpr bool is_exact = false;
    static constexpr bool is_complex = false;
    static double abs(double x) { return std::fabs(x); }
    static const char* mode_name() { return "float"; }
};

template <>
struct scalar_traits<Rational> {
    using real_t = Rational;
    static constexpr bool is_exact = true;
    static constexpr bool is_complex = false;
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static const char* mode_name() { return "exact"; }
};

template <>
struct scalar_traits<std::complex<double>> {
    using real_t = double;
    static constexpr bool is_exact = false;
    static constexpr bool is_complex = true;
    static double abs(const std::complex<double>& x) { return std::abs(x); }
    static const char* mode_name() { return "float"; }
};

template <class S>
using real_of = typename scalar_traits<S>::real_t;

template <class S>
real_of<S> abs_of(const S& x) {
    return scalar_traits<S>::abs(x);
}

/// Unit phase of a nonzero scalar: conj(x)/|x|, so that phase * x = |x|.
/// Exact (+1/-1) for real scalars, including rationals.
inline double unit_phase(double x) { return x < 0 ? -1.0 : 1.0; }
inline Rational unit_phase(const Rational& x) { return x < 0 ? Rational(-1) : Rational(1); }
inline std::complex<double> unit_phase(const std::complex<double>& x) {
    return std::conj(x) / std::abs(x);
}

template <class R>
R pow_int(const R& base, unsigned e) {
    R r(1);
    R b = base;
    while (e) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

/// Relative comparison tolerance for float-mode decisions. Exact mode
/// ignores it.
struct Tolerance {
    double rel = 1e-12;
};

// Three-way comparison of a magnitude against 1, with a boundary band in
// float mode. Exact mode decides strictly.
enum class CmpOne { below, equal_or_boundary, above };

inline CmpOne cmp_one(const Rational& x, const Tolerance&) {
    if (x < 1) return CmpOne::below;
    if (x > 1) return CmpOne::above;
    return CmpOne::equal_or_boundary;
}
inline CmpOne cmp_one(double x, const Tolerance& tol) {
    if (std::fabs(x - 1.0) <= tol.rel) return CmpOne::equal_or_boundary;
    return x < 1.0 ? CmpOne::below : CmpOne::above;
}

// ---------------------------------------------------------------------------
// rational parsing and construction helpers
// ---------------------------------------------------------------------------

/// Parse "p/q", integers, plain decimals and decimal exponents ("2.5e-3")
/// into an exact Rational.
inline Rational rational_from_string(const std::string& text) {
    auto fail = [&]() -> Rational {
        throw std::invalid_argument("cannot parse rational: '" + text + "'");
    };
    std::string s = text;
    if (s.empty()) fail();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        using boost::multiprecision::cpp_int;
        try {
            cpp_int num(s.substr(0, slash));
            cpp_int den(s.substr(slash + 1));
            if (den == 0) fail();
            return Rational(num, den);
        } catch (const std::exception&) {
            fail();
        }
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    long exponent = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.') {
            if (seen_dot) fail();
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            if (!seen_digit) fail();
            try {
                exponent = std::stol(s.substr(i + 1));
            } catch (const std::exception&) {
                fail();
            }
            break;
        } else {
            fail();
        }
    }
    if (!seen_digit) fail();
    using boost::multiprecision::cpp_int;
    cpp_int num(digits.empty() ? "0" : digits);
    if (neg) num = -num;
    long e10 = exponent - frac_digits;
    cpp_int den(1);
    if (e10 >= 0)
        num *= pow_int(cpp_int(10), static_cast<unsigned>(e10));
    else
        den = pow_int(cpp_int(10), static_cast<unsigned>(-e10));
    return Rational(num, den);
}

/// Exact dyadic rational from a finite double.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in exact mode");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    Rational r(mant);
    using boost::multiprecision::cpp_int;
    if (exp >= 0)
        r *= Rational(pow_int(cpp_int(2), static_cast<unsigned>(exp)));
    else
        r /= Rational(pow_int(cpp_int(2), static_cast<unsigned>(-exp)));
    return r;
}

/// A small-denominator rational close to `target`, nudged upward until
/// `above(s)` holds; caller guarantees such values exist arbitrarily close
/// above target.
template <class Pred>
Rational rational_at_least(double target, Pred above, unsigned denom = 1u << 14) {
    Rational s(static_cast<long long>(std::ceil(target * denom)), denom);
    int guard = 0;
    while (!above(s)) {
        s += Rational(1, denom);
        if (++guard > 4096) throw std::runtime_error("rational_at_least failed to bracket target");
    }
    return s;
}

template <class R>
R real_from_double(double x) {
    if constexpr (std::is_same_v<R, Rational>) {
        return rational_from_double(x);
    } else {
        return x;
    }
}

// Generic construction of S from a small fraction, for scalar-generic code
// and tests.
template <class S>
S from_fraction(long long num, long long den = 1);

template <>
inline double from_fraction<double>(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
}
template <>
inline Rational from_fraction<Rational>(long long num, long long den) {
    return Rational(num, den);
}
template <>
inline std::complex<double> from_fraction<std::complex<double>>(long long num, long long den) {
    return {static_cast<double>(num) / static_cast<double>(den), 0.0};
}

/// Raised when an iteration fails to converge or a certified budget is
/// exceeded; the CLI maps it to exit status 3.
class numeric_failure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace shiftdyn
