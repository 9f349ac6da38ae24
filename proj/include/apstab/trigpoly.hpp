#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/semimodule.hpp"

namespace apstab {

/// Finite sum  p(t) = sum_k c_k e^(i lambda_k t)  with exact complex
/// coefficients. Canonical: stored coefficients are nonzero, frequencies
/// distinct by exact equality. Immutable in spirit; all algebra returns
/// new values.
class TrigPoly {
public:
    using TermMap = std::map<Frequency, ExactComplex>;

    /// Empty polynomial with no basis yet; usable only as a placeholder.
    TrigPoly() = default;

    explicit TrigPoly(BasisPtr basis) : basis_(std::move(basis)) {
        if (!basis_) throw std::invalid_argument("TrigPoly: null basis");
    }

    static TrigPoly zero(const BasisPtr& basis) { return TrigPoly(basis); }
    static TrigPoly constant(const BasisPtr& basis, const ExactComplex& c) {
        TrigPoly p(basis);
        p.add_term(Frequency::zero(basis), c);
        return p;
    }
    /// c * e^(i lambda t)
    static TrigPoly harmonic(const Frequency& lambda, const ExactComplex& c) {
        TrigPoly p(lambda.basis());
        p.add_term(lambda, c);
        return p;
    }
    /// c * cos(lambda t), expanded to the exponential pair.
    static TrigPoly cosine(const Frequency& lambda, const ExactComplex& c = ExactComplex(1)) {
        ExactComplex half = c * ExactComplex(Rational(1, 2));
        TrigPoly p(lambda.basis());
        p.add_term(lambda, half);
        p.add_term(-lambda, half);
        return p;
    }
    /// c * sin(lambda t), expanded to the exponential pair.
    static TrigPoly sine(const Frequency& lambda, const ExactComplex& c = ExactComplex(1)) {
        // 1/(2i) = -i/2
        ExactComplex s = c * ExactComplex(ExactReal(), ExactReal(Rational(-1, 2)));
        TrigPoly p(lambda.basis());
        p.add_term(lambda, s);
        p.add_term(-lambda, -s);
        return p;
    }

    const BasisPtr& basis() const { return basis_; }
    const TermMap& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Frequency& freq, const ExactComplex& c) {
        if (!basis_) throw std::logic_error("TrigPoly: placeholder polynomial has no basis");
        require_same_basis(basis_, freq.basis());
        if (c.is_zero()) return;
        numeric_.reset();
        magnitudes_.reset();
        auto it = terms_.find(freq);
        if (it == terms_.end()) {
            terms_.emplace(freq, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Coefficient at lambda; zero if absent. This *is* the Bohr mean
    /// M_{lambda,p} = lim (1/2T) int e^(-i lambda t) p(t) dt.
    ExactComplex coefficient(const Frequency& lambda) const {
        auto it = terms_.find(lambda);
        return it == terms_.end() ? ExactComplex() : it->second;
    }

    /// Exact frequency set with nonzero coefficient.
    std::set<Frequency> spectrum() const {
        std::set<Frequency> s;
        for (const auto& [f, c] : terms_) s.insert(f);
        return s;
    }

    friend TrigPoly operator+(const TrigPoly& a, const TrigPoly& b) {
        require_same_basis(a.basis_, b.basis_);
        TrigPoly out = a;
        for (const auto& [f, c] : b.terms_) out.add_term(f, c);
        return out;
    }
    friend TrigPoly operator-(const TrigPoly& a, const TrigPoly& b) { return a + (-b); }
    TrigPoly operator-() const {
        TrigPoly out(basis_);
        for (const auto& [f, c] : terms_) out.terms_.emplace(f, -c);
        return out;
    }

    /// Convolution product: frequencies add, coefficients multiply exactly.
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        require_same_basis(a.basis_, b.basis_);
        TrigPoly out(a.basis_);
        for (const auto& [fa, ca] : a.terms_) {
            for (const auto& [fb, cb] : b.terms_) out.add_term(fa + fb, ca * cb);
        }
        return out;
    }

    TrigPoly scaled(const ExactComplex& c) const {
        TrigPoly out(basis_);
        if (c.is_zero()) return out;
        for (const auto& [f, x] : terms_) out.terms_.emplace(f, x * c);
        return out;
    }

    /// Pointwise complex conjugate: coefficients conjugate, frequencies negate.
    TrigPoly conjugate() const {
        TrigPoly out(basis_);
        for (const auto& [f, c] : terms_) out.add_term(-f, c.conj());
        return out;
    }

    /// (p + conj(p)) / 2
    TrigPoly real_part() const {
        TrigPoly out = *this + conjugate();
        return out.scaled(ExactComplex(Rational(1, 2)));
    }

    /// Frequency translation: p(t) -> e^(i shift t) p(t).
    TrigPoly translated(const Frequency& shift) const {
        require_same_basis(basis_, shift.basis());
        TrigPoly out(basis_);
        for (const auto& [f, c] : terms_) out.terms_.emplace(f + shift, c);
        return out;
    }

    friend bool operator==(const TrigPoly& a, const TrigPoly& b) {
        require_same_basis(a.basis_, b.basis_);
        return a.terms_ == b.terms_;
    }

    /// Certified upper bound on sum |c_k|, which dominates the sup norm.
    Rational l1_upper_bound() const {
        const MagnitudeTable& mags = magnitude_table();
        Rational s = 0;
        for (const auto& m : mags.ub) s += m;
        return s;
    }

    struct EvalResult {
        std::complex<double> value;
        double error_bound;  // frequency-enclosure width and rounding, combined
    };

    /// Numeric evaluation at t. Frequencies are evaluated through their
    /// certified enclosures (tabulated once per polynomial); the reported
    /// bound covers enclosure width and floating rounding.
    EvalResult eval(double t) const {
        const NumericTable& table = numeric_table();
        std::complex<double> acc(0.0, 0.0);
        double err = 0.0;
        const double eps = std::numeric_limits<double>::epsilon();
        for (const auto& row : table.rows) {
            acc += row.coeff * std::exp(std::complex<double>(0.0, row.lambda * t));
            err += row.coeff_mag * (std::abs(t) * row.halfwidth + 16.0 * eps * (1.0 + std::abs(row.lambda * t)));
        }
        return {acc, err};
    }

    double eval_abs(double t) const { return std::abs(eval(t).value); }

    /// Drops the smallest-magnitude terms whose certified moduli sum to at
    /// most drop_budget; returns the dropped l1 mass (an exact sup-norm bound
    /// on the perturbation).
    TrigPoly compressed(const Rational& drop_budget, Rational* dropped_mass = nullptr) const {
        if (dropped_mass) *dropped_mass = 0;
        if (drop_budget <= 0 || terms_.empty()) return *this;
        // cheap valid upper bounds suffice: only the dropped mass must be
        // certified, and it is the exact sum of these bounds; the drop order
        // itself may be ranked by double approximations
        struct Entry {
            double approx;
            Rational ub;
            const Frequency* freq;
        };
        std::vector<Entry> mags;
        mags.reserve(terms_.size());
        for (const auto& [f, c] : terms_) {
            Rational ub = c.abs_upper_fast();
            mags.push_back({apstab::to_double(ub), std::move(ub), &f});
        }
        std::sort(mags.begin(), mags.end(),
                  [](const Entry& a, const Entry& b) { return a.approx < b.approx; });
        Rational spent = 0;
        std::set<Frequency> drop;
        for (const auto& entry : mags) {
            if (spent + entry.ub > drop_budget) break;
            spent += entry.ub;
            drop.insert(*entry.freq);
        }
        if (drop.empty()) return *this;
        TrigPoly out(basis_);
        for (const auto& [f, c] : terms_) {
            if (!drop.count(f)) out.terms_.emplace(f, c);
        }
        if (dropped_mass) *dropped_mass = spent;
        return out;
    }

    /// Rounds every coefficient to dyadic 2^-bits resolution; the certified
    /// perturbation bound goes to the caller's error budget.
    TrigPoly rounded(unsigned bits, Rational* error_bound = nullptr) const {
        TrigPoly out(basis_);
        Rational err = 0;
        for (const auto& [f, c] : terms_) {
            auto [re, ere] = c.re().rounded(bits);
            auto [im, eim] = c.im().rounded(bits);
            err += ere + eim;
            ExactComplex rc(re, im);
            if (!rc.is_zero()) out.terms_.emplace(f, rc);
        }
        if (error_bound) *error_bound = err;
        return out;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [f, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "[" + c.str() + "]e^(i(" + f.str() + ")t)";
        }
        return s;
    }

private:
    struct NumericTable {
        struct Row {
            double lambda;
            double halfwidth;
            std::complex<double> coeff;
            double coeff_mag;
        };
        std::vector<Row> rows;
    };

    struct MagnitudeTable {
        std::vector<Rational> ub;  // certified |c_k| upper bounds, map order
    };

    const MagnitudeTable& magnitude_table() const {
        auto table = std::atomic_load(&magnitudes_);
        if (!table) {
            auto built = std::make_shared<MagnitudeTable>();
            built->ub.reserve(terms_.size());
            for (const auto& [f, c] : terms_) built->ub.push_back(c.abs_upper());
            std::atomic_store(&magnitudes_, std::shared_ptr<const MagnitudeTable>(built));
            table = built;
        }
        return *table;
    }

    const NumericTable& numeric_table() const {
        // copies share the table; any mutation resets the pointer
        auto table = std::atomic_load(&numeric_);
        if (!table) {
            auto built = std::make_shared<NumericTable>();
            built->rows.reserve(terms_.size());
            for (const auto& [f, c] : terms_) {
                RationalInterval enc = f.enclosure();
                NumericTable::Row row;
                row.lambda = apstab::to_double(enc.midpoint());
                row.halfwidth = apstab::to_double(enc.width()) * 0.5;
                row.coeff = c.to_complex();
                row.coeff_mag = std::abs(row.coeff);
                built->rows.push_back(row);
            }
            std::atomic_store(&numeric_, std::shared_ptr<const NumericTable>(built));
            table = built;
        }
        return *table;
    }

    BasisPtr basis_;
    TermMap terms_;
    mutable std::shared_ptr<const NumericTable> numeric_;
    mutable std::shared_ptr<const MagnitudeTable> magnitudes_;
};

/// Bohr mean of p at lambda: exact, equals the coefficient.
inline ExactComplex bohr_mean(const TrigPoly& p, const Frequency& lambda) { return p.coefficient(lambda); }

/// Bohr spectrum of p: exact frequency set.
inline std::set<Frequency> bohr_spectrum(const TrigPoly& p) { return p.spectrum(); }

/// Certificate that every frequency of a TrigPoly lies in a semi-module.
struct APLambdaCertificate {
    std::vector<std::pair<Frequency, std::vector<Integer>>> memberships;
    unsigned long bound = 0;
};

/// Raised when certification fails; distinguishes exact sign obstructions
/// from plain bound exhaustion.
class CertificationError : public std::runtime_error {
public:
    CertificationError(std::vector<Frequency> offending, unsigned long bound, bool exact_negative)
        : std::runtime_error(std::string("spectrum not certified inside the semi-module (") +
                             (exact_negative ? "exact sign obstruction" : "bound exhausted") +
                             ", bound " + std::to_string(bound) + ")"),
          offending_frequencies(std::move(offending)),
          bound(bound),
          exact_negative(exact_negative) {}

    std::vector<Frequency> offending_frequencies;
    unsigned long bound;
    bool exact_negative;
};

/// Verifies sigma_b(p) inside Lambda within the coefficient bound.
inline APLambdaCertificate certify_in_lambda(const TrigPoly& p, const SemiModule& lambda,
                                             unsigned long bound = kDefaultSearchBound) {
    APLambdaCertificate cert;
    cert.bound = bound;
    std::vector<Frequency> offending;
    bool exact_negative = false;

    int gen_lo = 2, gen_hi = -2;
    for (const auto& g : lambda.generators()) {
        int s = g.sign();
        if (s == 0) continue;
        gen_lo = std::min(gen_lo, s);
        gen_hi = std::max(gen_hi, s);
    }
    for (const auto& f : p.spectrum()) {
        MembershipResult m = lambda.member(f, bound);
        if (m.member) {
            cert.memberships.emplace_back(f, m.witness);
        } else {
            offending.push_back(f);
            int fs = f.sign();
            if ((gen_lo > 0 && fs < 0) || (gen_hi < 0 && fs > 0)) exact_negative = true;
        }
    }
    if (!offending.empty()) throw CertificationError(std::move(offending), bound, exact_negative);
    return cert;
}

/// Shape-tagged array of scalar TrigPolys (rows x cols); the carrier for
/// matrix coefficients A(t) and vector forcings.
class MatrixTrigPoly {
public:
    MatrixTrigPoly(BasisPtr basis, size_t rows, size_t cols)
        : basis_(std::move(basis)), rows_(rows), cols_(cols), entries_(rows * cols, TrigPoly(basis_)) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("MatrixTrigPoly: empty shape");
    }

    static MatrixTrigPoly from_scalar(const TrigPoly& p) {
        MatrixTrigPoly m(p.basis(), 1, 1);
        m.at(0, 0) = p;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const BasisPtr& basis() const { return basis_; }

    TrigPoly& at(size_t r, size_t c) { return entries_.at(r * cols_ + c); }
    const TrigPoly& at(size_t r, size_t c) const { return entries_.at(r * cols_ + c); }

    bool is_zero() const {
        for (const auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

    /// Union of entry spectra (frequencies pooled per matrix).
    std::set<Frequency> pooled_spectrum() const {
        std::set<Frequency> s;
        for (const auto& e : entries_) {
            auto es = e.spectrum();
            s.insert(es.begin(), es.end());
        }
        return s;
    }

    /// Exact coefficient matrix at one frequency.
    std::vector<std::vector<ExactComplex>> coefficient_matrix(const Frequency& f) const {
        std::vector<std::vector<ExactComplex>> out(rows_, std::vector<ExactComplex>(cols_));
        for (size_t r = 0; r < rows_; ++r)
            for (size_t c = 0; c < cols_; ++c) out[r][c] = at(r, c).coefficient(f);
        return out;
    }

    friend MatrixTrigPoly operator+(const MatrixTrigPoly& a, const MatrixTrigPoly& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("MatrixTrigPoly: shape mismatch in +");
        MatrixTrigPoly out = a;
        for (size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] = out.entries_[i] + b.entries_[i];
        return out;
    }

    friend MatrixTrigPoly operator*(const MatrixTrigPoly& a, const MatrixTrigPoly& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("MatrixTrigPoly: shape mismatch in *");
        MatrixTrigPoly out(a.basis_, a.rows_, b.cols_);
        for (size_t r = 0; r < a.rows_; ++r) {
            for (size_t c = 0; c < b.cols_; ++c) {
                TrigPoly acc(a.basis_);
                for (size_t k = 0; k < a.cols_; ++k) acc = acc + a.at(r, k) * b.at(k, c);
                out.at(r, c) = acc;
            }
        }
        return out;
    }

    /// Max row sum of entry l1 bounds: certified upper bound on sup_t ||A(t)||_inf.
    Rational sup_norm_upper_bound() const {
        Rational best = 0;
        for (size_t r = 0; r < rows_; ++r) {
            Rational row = 0;
            for (size_t c = 0; c < cols_; ++c) row += at(r, c).l1_upper_bound();
            best = std::max(best, row);
        }
        return best;
    }

private:
    BasisPtr basis_;
    size_t rows_, cols_;
    std::vector<TrigPoly> entries_;
};

}  // namespace apstab
