#pragma once

#include <compare>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "apstab/numeric.hpp"

namespace apstab {

/// One multiplicative symbol sqrt(surd) * pi^pi_pow, surd square-free >= 1.
/// Distinct radicals are linearly independent over the rationals (independence
/// of square roots is classical; transcendence of pi covers the pi powers).
struct Radical {
    Integer surd = 1;  // square-free positive integer; 1 means no root factor
    int pi_pow = 0;

    bool is_unit() const { return surd == 1 && pi_pow == 0; }

    friend bool operator==(const Radical& a, const Radical& b) {
        return a.surd == b.surd && a.pi_pow == b.pi_pow;
    }
    friend bool operator<(const Radical& a, const Radical& b) {
        if (a.pi_pow != b.pi_pow) return a.pi_pow < b.pi_pow;
        return a.surd < b.surd;
    }

    /// Product reduces sqrt(a)*sqrt(b) = g*sqrt(ab/g^2); returns the reduced
    /// radical and the rational factor pulled out.
    static std::pair<Radical, Rational> multiply(const Radical& a, const Radical& b) {
        Integer g = boost::multiprecision::gcd(a.surd, b.surd);
        Radical r;
        r.surd = (a.surd / g) * (b.surd / g);
        r.pi_pow = a.pi_pow + b.pi_pow;
        return {r, Rational(g)};
    }
};

/// Exact real number: finite rational combination of radicals.
/// Canonical form stores no zero coefficients; the empty sum is zero.
class ExactReal {
public:
    using TermMap = std::map<Radical, Rational>;

    ExactReal() = default;
    ExactReal(const Rational& q) {  // NOLINT(google-explicit-constructor)
        if (q != 0) terms_[Radical{}] = q;
    }
    ExactReal(long v) : ExactReal(Rational(v)) {}  // NOLINT(google-explicit-constructor)
    ExactReal(int v) : ExactReal(Rational(v)) {}   // NOLINT(google-explicit-constructor)

    static ExactReal term(const Rational& coeff, const Radical& rad) {
        ExactReal x;
        if (coeff != 0) x.terms_[rad] = coeff;
        return x;
    }
    static ExactReal sqrt_of(const Integer& square_free_d, const Rational& coeff = Rational(1)) {
        if (!is_square_free(square_free_d)) throw std::domain_error("ExactReal::sqrt_of: d not square-free");
        Integer root;
        if (square_free_d == 1) return ExactReal(coeff);
        return term(coeff, Radical{square_free_d, 0});
    }
    static ExactReal pi(const Rational& coeff = Rational(1), int power = 1) {
        return term(coeff, Radical{Integer(1), power});
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
    }
    Rational rational_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_rational()) throw std::domain_error("ExactReal::rational_value: not rational");
        return terms_.begin()->second;
    }

    ExactReal operator-() const {
        ExactReal out;
        for (const auto& [rad, q] : terms_) out.terms_[rad] = -q;
        return out;
    }

    ExactReal& operator+=(const ExactReal& o) {
        for (const auto& [rad, q] : o.terms_) {
            auto it = terms_.find(rad);
            if (it == terms_.end()) {
                terms_[rad] = q;
            } else {
                it->second += q;
                if (it->second == 0) terms_.erase(it);
            }
        }
        return *this;
    }
    ExactReal& operator-=(const ExactReal& o) { return *this += -o; }

    friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
    friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }

    friend ExactReal operator*(const ExactReal& a, const ExactReal& b) {
        ExactReal out;
        for (const auto& [ra, qa] : a.terms_) {
            for (const auto& [rb, qb] : b.terms_) {
                auto [rad, factor] = Radical::multiply(ra, rb);
                Rational coeff = qa * qb * factor;
                auto it = out.terms_.find(rad);
                if (it == out.terms_.end()) {
                    if (coeff != 0) out.terms_[rad] = coeff;
                } else {
                    it->second += coeff;
                    if (it->second == 0) out.terms_.erase(it);
                }
            }
        }
        return out;
    }
    ExactReal& operator*=(const ExactReal& o) { return *this = *this * o; }

    friend bool operator==(const ExactReal& a, const ExactReal& b) { return a.terms_ == b.terms_; }

    /// Exact multiplicative inverse. Defined for any nonzero value whose terms
    /// share one pi power (surd parts invert by repeated conjugation).
    ExactReal inverse() const {
        if (is_zero()) throw std::domain_error("ExactReal::inverse: zero");
        int pi_pow = terms_.begin()->first.pi_pow;
        for (const auto& [rad, q] : terms_)
            if (rad.pi_pow != pi_pow)
                throw std::domain_error("ExactReal::inverse: mixed pi powers are not exactly invertible");
        // Strip the common pi power, invert the surd part, restore pi^-k.
        ExactReal surd_part;
        for (const auto& [rad, q] : terms_) surd_part.terms_[Radical{rad.surd, 0}] = q;
        ExactReal inv = surd_part.invert_surd_only();
        ExactReal out;
        for (const auto& [rad, q] : inv.terms_) out.terms_[Radical{rad.surd, rad.pi_pow - pi_pow}] = q;
        return out;
    }

    /// Exact division; see inverse() for the supported divisor class.
    friend ExactReal operator/(const ExactReal& a, const ExactReal& b) { return a * b.inverse(); }

    /// Certified enclosure at the given dyadic precision.
    RationalInterval enclosure(unsigned bits = 128) const {
        RationalInterval acc{Rational(0), Rational(0)};
        for (const auto& [rad, q] : terms_) {
            RationalInterval factor(Rational(1));
            if (rad.surd != 1) factor = factor * sqrt_interval(rad.surd, bits + 8);
            if (rad.pi_pow != 0) factor = factor * pow_interval_positive(pi_interval(bits + 8), rad.pi_pow);
            acc = acc + factor * q;
        }
        return acc;
    }

    /// Sign decided exactly: 0 from canonical form, otherwise by refining the
    /// enclosure until it excludes zero (terminates: nonzero canonical values
    /// are nonzero reals by radical independence).
    int sign() const {
        if (is_zero()) return 0;
        if (is_rational()) return rational_value() > 0 ? 1 : -1;
        for (unsigned bits = 64; bits <= 16384; bits *= 2) {
            RationalInterval e = enclosure(bits);
            if (!e.contains_zero()) return e.lo > 0 ? 1 : -1;
        }
        throw std::runtime_error("ExactReal::sign: sign not resolved at 16384 bits");
    }

    friend bool operator<(const ExactReal& a, const ExactReal& b) { return (a - b).sign() < 0; }

    double to_double(unsigned bits = 128) const { return apstab::to_double(enclosure(bits).midpoint()); }

    /// Upper bound on |value|, certified.
    Rational abs_upper(unsigned bits = 64) const { return enclosure(bits).abs_upper(); }

    /// Cheap valid upper bound: sum of |coordinate| * radical bound. Looser
    /// than abs_upper but avoids interval squaring; meant for error budgets.
    Rational abs_upper_fast() const {
        Rational out = 0;
        for (const auto& [rad, q] : terms_) {
            Rational factor(1);
            if (rad.surd != 1) factor *= sqrt_interval(rad.surd, 16).hi;
            if (rad.pi_pow != 0) factor *= pow_interval_positive(pi_interval(16), rad.pi_pow).abs_upper();
            out += boost::multiprecision::abs(q) * factor;
        }
        return out;
    }

    /// Dyadic rounding of every coordinate to 2^-bits resolution, with a
    /// certified bound on |this - rounded|. Keeps the radical structure but
    /// shrinks the rational representations.
    std::pair<ExactReal, Rational> rounded(unsigned bits) const {
        ExactReal out;
        Rational err = 0;
        Integer scale = Integer(1) << bits;
        for (const auto& [rad, q] : terms_) {
            Integer n = (rational_num(q) * scale) / rational_den(q);  // toward zero
            Rational rounded_q(n, scale);
            if (rounded_q != 0) out.terms_[rad] = rounded_q;
            Rational delta = boost::multiprecision::abs(q - rounded_q);
            if (delta != 0) {
                RationalInterval unit(Rational(1));
                RationalInterval factor = unit;
                if (rad.surd != 1) factor = factor * sqrt_interval(rad.surd, 16);
                if (rad.pi_pow != 0) factor = factor * pow_interval_positive(pi_interval(16), rad.pi_pow);
                err += delta * factor.abs_upper();
            }
        }
        return {out, err};
    }

    /// True when the value is an integer (exactly decidable).
    bool is_integer() const {
        if (is_zero()) return true;
        return is_rational() && rational_den(rational_value()) == 1;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [rad, q] : terms_) {
            if (!first) os << (q > 0 ? " + " : " - ");
            else if (q < 0) os << "-";
            Rational aq = boost::multiprecision::abs(q);
            bool unit = rad.is_unit();
            if (aq != 1 || unit) os << aq;
            if (rad.surd != 1) os << (aq != 1 ? "*" : "") << "sqrt(" << rad.surd << ")";
            if (rad.pi_pow != 0) {
                os << ((aq != 1 || rad.surd != 1) ? "*" : "") << "pi";
                if (rad.pi_pow != 1) os << "^" << rad.pi_pow;
            }
            first = false;
        }
        return os.str();
    }

private:
    /// Inverse of a nonzero surd-only value by conjugating away one prime at a
    /// time: split terms on whether p divides the surd, multiply by the
    /// conjugate, and recurse on the p-free product.
    ExactReal invert_surd_only() const {
        if (is_rational()) {
            Rational q = rational_value();
            return ExactReal(Rational(1) / q);
        }
        Integer p = 0;
        for (const auto& [rad, q] : terms_) {
            if (rad.surd != 1) {
                // smallest prime factor of the first non-unit surd
                Integer m = rad.surd;
                for (Integer d = 2; d * d <= m; ++d) {
                    if (m % d == 0) {
                        p = d;
                        break;
                    }
                }
                if (p == 0) p = m;
                break;
            }
        }
        ExactReal keep, flip;
        for (const auto& [rad, q] : terms_) {
            if (rad.surd % p == 0)
                flip.terms_[rad] = q;
            else
                keep.terms_[rad] = q;
        }
        ExactReal conj = keep - flip;
        ExactReal norm = *this * conj;  // p no longer divides any surd here
        return conj * norm.invert_surd_only();
    }

    TermMap terms_;
};

/// Exact complex number over ExactReal components.
class ExactComplex {
public:
    ExactComplex() = default;
    ExactComplex(ExactReal re, ExactReal im = ExactReal()) : re_(std::move(re)), im_(std::move(im)) {}
    ExactComplex(const Rational& re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    ExactComplex(int re) : re_(Rational(re)) {}    // NOLINT(google-explicit-constructor)

    static ExactComplex i(const ExactReal& im = ExactReal(Rational(1))) { return ExactComplex(ExactReal(), im); }

    const ExactReal& re() const { return re_; }
    const ExactReal& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

    ExactComplex operator-() const { return {-re_, -im_}; }
    ExactComplex conj() const { return {re_, -im_}; }

    friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    ExactComplex& operator+=(const ExactComplex& o) { return *this = *this + o; }
    ExactComplex& operator-=(const ExactComplex& o) { return *this = *this - o; }
    ExactComplex& operator*=(const ExactComplex& o) { return *this = *this * o; }

    ExactReal norm_sq() const { return re_ * re_ + im_ * im_; }

    ExactComplex inverse() const {
        if (is_zero()) throw std::domain_error("ExactComplex::inverse: zero");
        ExactReal inv_n = norm_sq().inverse();
        return {re_ * inv_n, -(im_ * inv_n)};
    }
    friend ExactComplex operator/(const ExactComplex& a, const ExactComplex& b) { return a * b.inverse(); }

    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    std::complex<double> to_complex(unsigned bits = 128) const {
        return {re_.to_double(bits), im_.to_double(bits)};
    }

    /// Certified upper bound on the modulus.
    Rational abs_upper(unsigned bits = 64) const {
        RationalInterval n = norm_sq().enclosure(bits);
        Rational hi = n.hi < 0 ? Rational(0) : n.hi;
        return sqrt_upper_bound(hi, bits);
    }

    /// Dyadic rounding of both components with a certified |delta| bound.
    std::pair<ExactComplex, Rational> rounded(unsigned bits) const {
        auto [re, ere] = re_.rounded(bits);
        auto [im, eim] = im_.rounded(bits);
        return {ExactComplex(std::move(re), std::move(im)), ere + eim};
    }

    /// Loose but cheap modulus bound: |re| + |im| bounds.
    Rational abs_upper_fast() const { return re_.abs_upper_fast() + im_.abs_upper_fast(); }

    std::string str() const { return "(" + re_.str() + ") + (" + im_.str() + ")i"; }

private:
    ExactReal re_;
    ExactReal im_;
};

}  // namespace apstab
