#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace apstab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Integer rational_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer rational_den(const Rational& r) { return boost::multiprecision::denominator(r); }

/// Floor of sqrt(n) for n >= 0.
inline Integer isqrt_floor(const Integer& n) {
    if (n < 0) throw std::domain_error("isqrt_floor: negative argument");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const Integer& n, Integer* root = nullptr) {
    if (n < 0) return false;
    Integer s = isqrt_floor(n);
    if (root) *root = s;
    return s * s == n;
}

/// True when n has no square factor > 1 (trial division).
inline bool is_square_free(const Integer& n) {
    if (n <= 0) return false;
    Integer m = n;
    for (Integer p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return false;
        }
    }
    return true;
}

/// Closed rational interval [lo, hi]; the basic certified-enclosure carrier.
struct RationalInterval {
    Rational lo;
    Rational hi;

    RationalInterval() = default;
    explicit RationalInterval(const Rational& point) : lo(point), hi(point) {}
    RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::invalid_argument("RationalInterval: lo > hi");
    }

    Rational width() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / 2; }
    bool contains_zero() const { return lo <= 0 && hi >= 0; }

    RationalInterval operator+(const RationalInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RationalInterval operator-(const RationalInterval& o) const { return {lo - o.hi, hi - o.lo}; }

    RationalInterval operator*(const Rational& q) const {
        if (q >= 0) return {lo * q, hi * q};
        return {hi * q, lo * q};
    }

    RationalInterval operator*(const RationalInterval& o) const {
        Rational a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min(std::min(a, b), std::min(c, d)), std::max(std::max(a, b), std::max(c, d))};
    }

    /// Reciprocal; requires the interval to exclude zero.
    RationalInterval reciprocal() const {
        if (contains_zero()) throw std::domain_error("RationalInterval::reciprocal: contains zero");
        return {Rational(1) / hi, Rational(1) / lo};
    }

    /// Upper bound on |x| over the interval.
    Rational abs_upper() const { return std::max(boost::multiprecision::abs(lo), boost::multiprecision::abs(hi)); }
    /// Lower bound on |x| over the interval (0 if it straddles zero).
    Rational abs_lower() const {
        if (contains_zero()) return Rational(0);
        return std::min(boost::multiprecision::abs(lo), boost::multiprecision::abs(hi));
    }
};

/// Certified enclosure of sqrt(d) with width <= 2^-bits, d > 0. Cached:
/// the same radicands are queried constantly.
inline RationalInterval sqrt_interval(const Integer& d, unsigned bits) {
    if (d <= 0) throw std::domain_error("sqrt_interval: nonpositive radicand");
    static std::mutex mu;
    static std::map<std::pair<Integer, unsigned>, RationalInterval> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({d, bits});
        if (it != cache.end()) return it->second;
    }
    Integer scale = Integer(1) << (2 * bits);
    Integer s = isqrt_floor(d * scale);
    Integer den = Integer(1) << bits;
    RationalInterval out{Rational(s, den), Rational(s + 1, den)};
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(d, bits), out);
    return out;
}

/// Certified enclosure of sqrt(r) for rational r >= 0, width ~ 2^-bits relative.
inline RationalInterval sqrt_interval(const Rational& r, unsigned bits) {
    if (r < 0) throw std::domain_error("sqrt_interval: negative argument");
    if (r == 0) return RationalInterval(Rational(0));
    Integer p = rational_num(r), q = rational_den(r);
    // sqrt(p/q) = sqrt(p*q)/q
    Integer scale = Integer(1) << (2 * bits);
    Integer s = isqrt_floor(p * q * scale);
    Integer den = q * (Integer(1) << bits);
    return {Rational(s, den), Rational(s + 1, den)};
}

namespace detail {

/// Enclosure of arctan(1/x) via the alternating Gregory series; exact rational
/// partial sums, tail bounded by the first omitted term.
inline RationalInterval arctan_inv_interval(const Integer& x, unsigned bits) {
    Rational sum(0);
    Rational term;
    Integer x2 = x * x;
    Integer power = x;  // x^(2k+1)
    int sign = 1;
    Rational tol = Rational(1, Integer(1) << (bits + 4));
    for (unsigned k = 0;; ++k) {
        term = Rational(1, power * (2 * k + 1));
        if (term <= tol) break;
        sum += sign > 0 ? term : -term;
        power *= x2;
        sign = -sign;
        if (k > 100000) throw std::runtime_error("arctan series failed to converge");
    }
    return {sum - term, sum + term};
}

}  // namespace detail

/// Certified enclosure of pi (Machin's formula), cached per precision.
inline RationalInterval pi_interval(unsigned bits) {
    static std::mutex mu;
    static std::map<unsigned, RationalInterval> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
    RationalInterval a5 = detail::arctan_inv_interval(Integer(5), bits + 6);
    RationalInterval a239 = detail::arctan_inv_interval(Integer(239), bits + 6);
    RationalInterval pi = a5 * Rational(16) - a239 * Rational(4);
    cache[bits] = pi;
    return pi;
}

/// Integer power of an interval known to be strictly positive.
inline RationalInterval pow_interval_positive(const RationalInterval& base, int k) {
    if (base.lo <= 0) throw std::domain_error("pow_interval_positive: base not strictly positive");
    if (k == 0) return RationalInterval(Rational(1));
    bool inv = k < 0;
    unsigned n = static_cast<unsigned>(inv ? -k : k);
    Rational lo = 1, hi = 1;
    for (unsigned i = 0; i < n; ++i) {
        lo *= base.lo;
        hi *= base.hi;
    }
    RationalInterval out{lo, hi};
    return inv ? out.reciprocal() : out;
}

/// Rational upper bound on sqrt(r), within relative 2^-bits.
inline Rational sqrt_upper_bound(const Rational& r, unsigned bits = 32) {
    return sqrt_interval(r, bits).hi;
}

/// Parses a decimal string ("-1.25", "3e-2", "7/10") into an exact Rational.
inline Rational parse_decimal(const std::string& text) {
    std::string s = text;
    auto fail = [&]() { throw std::invalid_argument("parse_decimal: bad number '" + text + "'"); };
    if (s.empty()) fail();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) fail();
        return Rational(num, den);
    }
    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    Integer mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false, in_frac = false;
    long exp10 = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (in_frac) ++frac_digits;
            any_digit = true;
        } else if (c == '.') {
            if (in_frac) fail();
            in_frac = true;
        } else if (c == 'e' || c == 'E') {
            exp10 = std::stol(s.substr(i + 1));
            break;
        } else {
            fail();
        }
    }
    if (!any_digit) fail();
    Rational value(mantissa);
    long shift = exp10 - frac_digits;
    Integer ten_pow = 1;
    for (long k = 0; k < std::labs(shift); ++k) ten_pow *= 10;
    if (shift >= 0)
        value *= Rational(ten_pow);
    else
        value /= Rational(ten_pow);
    return neg ? -value : value;
}

/// Exact Rational from a double (doubles are dyadic rationals).
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite");
    Rational r;
    if (x == 0.0) return r;
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    Integer mant = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    r = Rational(mant);
    if (exp > 0)
        r *= Rational(Integer(1) << exp);
    else if (exp < 0)
        r /= Rational(Integer(1) << (-exp));
    return r;
}

}  // namespace apstab
