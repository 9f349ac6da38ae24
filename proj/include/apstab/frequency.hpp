#pragma once

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/exact.hpp"

namespace apstab {

/// Supported exact constant kinds for basis entries.
enum class ConstantKind { Rational, Sqrt, Pi };

/// One of: p/q, (p/q)*sqrt(d) with d square-free, or (p/q)*pi.
struct RealConstant {
    ConstantKind kind = ConstantKind::Rational;
    Rational scale = Rational(1);  // p/q, canonical via cpp_rational
    Integer surd = 1;              // only for Sqrt

    static RealConstant rational(const Rational& q) { return {ConstantKind::Rational, q, Integer(1)}; }
    static RealConstant sqrt(const Integer& d, const Rational& scale = Rational(1)) {
        if (d < 2) throw std::invalid_argument("RealConstant::sqrt: d must be >= 2");
        if (!is_square_free(d)) throw std::invalid_argument("RealConstant::sqrt: d must be square-free");
        return {ConstantKind::Sqrt, scale, d};
    }
    static RealConstant pi(const Rational& scale = Rational(1)) { return {ConstantKind::Pi, scale, Integer(1)}; }

    bool is_zero() const { return scale == 0; }

    ExactReal value() const {
        switch (kind) {
            case ConstantKind::Rational: return ExactReal(scale);
            case ConstantKind::Sqrt: return ExactReal::sqrt_of(surd, scale);
            case ConstantKind::Pi: return ExactReal::pi(scale);
        }
        throw std::logic_error("RealConstant::value: bad kind");
    }

    RationalInterval enclosure(unsigned bits) const { return value().enclosure(bits); }

    /// Exact test: is a/b rational? Decidable within the supported kinds
    /// (pi-vs-surd independence is assumed, matching the construction rules).
    static bool rationally_dependent(const RealConstant& a, const RealConstant& b) {
        if (a.is_zero() || b.is_zero()) return true;
        if (a.kind != b.kind) return false;
        if (a.kind == ConstantKind::Sqrt) return a.surd == b.surd;
        return true;  // two rationals or two pi-multiples
    }

    friend bool operator==(const RealConstant& a, const RealConstant& b) {
        return a.kind == b.kind && a.scale == b.scale && a.surd == b.surd;
    }

    std::string str() const { return value().str(); }
};

/// Ordered list of rationally independent constants spanning the frequencies
/// in play, plus the default evaluation precision.
class FrequencyBasis {
public:
    explicit FrequencyBasis(std::vector<RealConstant> entries, unsigned precision_bits = 128)
        : entries_(std::move(entries)), precision_bits_(precision_bits) {
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].is_zero()) throw std::invalid_argument("FrequencyBasis: zero entry");
            for (size_t j = i + 1; j < entries_.size(); ++j) {
                if (RealConstant::rationally_dependent(entries_[i], entries_[j]))
                    throw std::invalid_argument("FrequencyBasis: entries " + std::to_string(i) + " and " +
                                                std::to_string(j) + " are rationally dependent");
            }
        }
    }

    size_t size() const { return entries_.size(); }
    const RealConstant& entry(size_t i) const { return entries_.at(i); }
    const std::vector<RealConstant>& entries() const { return entries_; }
    unsigned precision_bits() const { return precision_bits_; }

    friend bool operator==(const FrequencyBasis& a, const FrequencyBasis& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::vector<RealConstant> entries_;
    unsigned precision_bits_;
};

using BasisPtr = std::shared_ptr<const FrequencyBasis>;

inline BasisPtr make_basis(std::vector<RealConstant> entries, unsigned precision_bits = 128) {
    return std::make_shared<const FrequencyBasis>(std::move(entries), precision_bits);
}

inline void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
    if (a == b) return;
    if (a && b && *a == *b) return;
    throw std::invalid_argument("operands use different frequency bases");
}

/// Real frequency as an exact rational coordinate vector over a basis.
/// Equality, sign and ordering are decided exactly.
class Frequency {
public:
    Frequency() = default;
    Frequency(BasisPtr basis, std::vector<Rational> coords) : basis_(std::move(basis)), coords_(std::move(coords)) {
        if (!basis_) throw std::invalid_argument("Frequency: null basis");
        if (coords_.size() != basis_->size()) throw std::invalid_argument("Frequency: coordinate count mismatch");
    }

    static Frequency zero(const BasisPtr& basis) {
        return Frequency(basis, std::vector<Rational>(basis->size(), Rational(0)));
    }
    /// Coordinate unit vector scaled by c.
    static Frequency axis(const BasisPtr& basis, size_t index, const Rational& c = Rational(1)) {
        std::vector<Rational> coords(basis->size(), Rational(0));
        coords.at(index) = c;
        return Frequency(basis, std::move(coords));
    }

    const BasisPtr& basis() const { return basis_; }
    const std::vector<Rational>& coords() const { return coords_; }

    bool is_zero() const {
        for (const auto& c : coords_)
            if (c != 0) return false;
        return true;
    }

    ExactReal value() const {
        ExactReal v;
        for (size_t j = 0; j < coords_.size(); ++j) {
            if (coords_[j] != 0) v += basis_->entry(j).value() * ExactReal(coords_[j]);
        }
        return v;
    }

    /// Sign of the real value, exact. Declared basis independence makes the
    /// coordinate form faithful, so zero iff all coordinates vanish.
    int sign() const {
        if (is_zero()) return 0;
        return value().sign();
    }

    RationalInterval enclosure() const { return value().enclosure(basis_->precision_bits()); }
    RationalInterval enclosure(unsigned bits) const { return value().enclosure(bits); }
    double to_double() const { return apstab::to_double(enclosure().midpoint()); }

    Frequency operator-() const {
        std::vector<Rational> c(coords_);
        for (auto& x : c) x = -x;
        return Frequency(basis_, std::move(c));
    }
    friend Frequency operator+(const Frequency& a, const Frequency& b) {
        require_same_basis(a.basis_, b.basis_);
        std::vector<Rational> c(a.coords_);
        for (size_t j = 0; j < c.size(); ++j) c[j] += b.coords_[j];
        return Frequency(a.basis_, std::move(c));
    }
    friend Frequency operator-(const Frequency& a, const Frequency& b) { return a + (-b); }
    Frequency scaled(const Rational& q) const {
        std::vector<Rational> c(coords_);
        for (auto& x : c) x *= q;
        return Frequency(basis_, std::move(c));
    }

    friend bool operator==(const Frequency& a, const Frequency& b) {
        require_same_basis(a.basis_, b.basis_);
        return a.coords_ == b.coords_;
    }

    /// Strict total order by coordinates (canonical container order; not the
    /// numeric order — use sign() for value comparisons). Compares canonical
    /// numerator/denominator pairs directly, with no rational arithmetic.
    friend bool operator<(const Frequency& a, const Frequency& b) {
        require_same_basis(a.basis_, b.basis_);
        for (size_t j = 0; j < a.coords_.size(); ++j) {
            const Rational& x = a.coords_[j];
            const Rational& y = b.coords_[j];
            int c = rational_num(x).compare(rational_num(y));
            if (c != 0) return c < 0;
            c = rational_den(x).compare(rational_den(y));
            if (c != 0) return c < 0;
        }
        return false;
    }

    /// True when a = q*b for a rational q (exact; false if b is zero and a isn't).
    static bool rational_ratio(const Frequency& a, const Frequency& b, Rational* ratio = nullptr) {
        require_same_basis(a.basis_, b.basis_);
        if (b.is_zero()) {
            if (ratio) *ratio = 0;
            return a.is_zero();
        }
        size_t pivot = 0;
        while (b.coords_[pivot] == 0) {
            if (a.coords_[pivot] != 0) return false;
            ++pivot;
        }
        Rational q = a.coords_[pivot] / b.coords_[pivot];
        for (size_t j = 0; j < a.coords_.size(); ++j) {
            if (a.coords_[j] != b.coords_[j] * q) return false;
        }
        if (ratio) *ratio = q;
        return true;
    }

    std::string str() const {
        ExactReal v = value();
        return v.str();
    }
    std::string coords_str() const {
        std::ostringstream os;
        os << "(";
        for (size_t j = 0; j < coords_.size(); ++j) {
            if (j) os << ", ";
            os << coords_[j];
        }
        os << ")";
        return os.str();
    }

private:
    BasisPtr basis_;
    std::vector<Rational> coords_;
};

}  // namespace apstab
