#pragma once

// Test-side oracles, independent of the library code paths they check:
// an adaptive Simpson quadrature, a classical fixed-step RK4 integrator,
// brute-force semi-module enumeration, and a seeded random TrigPoly source.

#include <complex>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "apstab/frequency.hpp"
#include "apstab/trigpoly.hpp"

namespace oracles {

using Cplx = std::complex<double>;

inline Cplx simpson_slice(double a, double b, Cplx fa, Cplx fm, Cplx fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline Cplx simpson_rec(const std::function<Cplx(double)>& f, double a, double b, Cplx fa, Cplx fm, Cplx fb,
                        Cplx whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Cplx flm = f(lm), frm = f(rm);
    Cplx left = simpson_slice(a, m, fa, flm, fm);
    Cplx right = simpson_slice(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

/// Adaptive Simpson quadrature of a complex integrand.
inline Cplx integrate(const std::function<Cplx(double)>& f, double a, double b, double tol = 1e-10) {
    if (a == b) return {0.0, 0.0};
    // split into unit-length panels so oscillatory integrands are resolved
    int panels = std::max(1, int(std::ceil(std::abs(b - a))));
    Cplx total = 0;
    for (int p = 0; p < panels; ++p) {
        double x0 = a + (b - a) * double(p) / panels;
        double x1 = a + (b - a) * double(p + 1) / panels;
        double xm = 0.5 * (x0 + x1);
        Cplx f0 = f(x0), fm = f(xm), f1 = f(x1);
        total += simpson_rec(f, x0, x1, f0, fm, f1, simpson_slice(x0, x1, f0, fm, f1), tol / panels, 40);
    }
    return total;
}

/// Classical fixed-step RK4 over a complex vector field.
inline std::vector<Cplx> rk4_fixed(const std::function<std::vector<Cplx>(double, const std::vector<Cplx>&)>& f,
                                   double s, double t, std::vector<Cplx> x, int steps) {
    double h = (t - s) / steps;
    auto axpy = [](const std::vector<Cplx>& a, double c, const std::vector<Cplx>& b) {
        std::vector<Cplx> out(a.size());
        for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c * b[i];
        return out;
    };
    double time = s;
    for (int i = 0; i < steps; ++i) {
        auto k1 = f(time, x);
        auto k2 = f(time + h / 2, axpy(x, h / 2, k1));
        auto k3 = f(time + h / 2, axpy(x, h / 2, k2));
        auto k4 = f(time + h, axpy(x, h, k3));
        for (size_t j = 0; j < x.size(); ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        time += h;
    }
    return x;
}

/// Brute-force box enumeration of { sum n_j g_j : 0 <= n_j <= bound } as
/// numeric values (independent of the library's set machinery).
inline std::vector<double> enumerate_box_values(const std::vector<double>& gens, unsigned long bound) {
    std::vector<double> values{0.0};
    for (double g : gens) {
        std::vector<double> next;
        next.reserve(values.size() * (bound + 1));
        for (double v : values) {
            for (unsigned long n = 0; n <= bound; ++n) next.push_back(v + g * double(n));
        }
        values = std::move(next);
    }
    return values;
}

/// Deterministic random TrigPoly over a given basis: small integer-rational
/// frequency coordinates and small rational coefficients.
class RandomPolySource {
public:
    explicit RandomPolySource(apstab::BasisPtr basis, unsigned seed = 20260810)
        : basis_(std::move(basis)), rng_(seed) {}

    apstab::Rational small_rational(int num_range = 3, int den_range = 3) {
        std::uniform_int_distribution<int> num(-num_range, num_range);
        std::uniform_int_distribution<int> den(1, den_range);
        return apstab::Rational(num(rng_), den(rng_));
    }

    apstab::Frequency frequency(bool allow_zero = true) {
        while (true) {
            std::vector<apstab::Rational> coords;
            for (size_t j = 0; j < basis_->size(); ++j) coords.push_back(small_rational(2, 2));
            apstab::Frequency f(basis_, coords);
            if (allow_zero || !f.is_zero()) return f;
        }
    }

    apstab::ExactComplex coefficient() {
        while (true) {
            apstab::ExactComplex c{apstab::ExactReal(small_rational()), apstab::ExactReal(small_rational())};
            if (!c.is_zero()) return c;
        }
    }

    apstab::TrigPoly poly(size_t max_terms = 4, bool allow_zero_freq = true) {
        std::uniform_int_distribution<size_t> count(1, max_terms);
        apstab::TrigPoly p(basis_);
        size_t n = count(rng_);
        for (size_t i = 0; i < n; ++i) p.add_term(frequency(allow_zero_freq), coefficient());
        return p;
    }

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(rng_);
    }
    int uniform_int(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng_);
    }

    std::mt19937& rng() { return rng_; }

private:
    apstab::BasisPtr basis_;
    std::mt19937 rng_;
};

inline apstab::BasisPtr one_sqrt2_basis() {
    return apstab::make_basis({apstab::RealConstant::rational(apstab::Rational(1)),
                               apstab::RealConstant::sqrt(apstab::Integer(2))});
}

}  // namespace oracles
