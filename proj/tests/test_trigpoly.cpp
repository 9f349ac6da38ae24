#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "apstab/trigpoly.hpp"
#include "oracles.hpp"

using namespace apstab;
using oracles::Cplx;

namespace {

Frequency freq(const BasisPtr& basis, int ones, int roots) {
    return Frequency(basis, {Rational(ones), Rational(roots)});
}

/// cos t + cos(sqrt2 t) - 2, the running example coefficient.
TrigPoly example2_coefficient(const BasisPtr& basis) {
    TrigPoly p = TrigPoly::cosine(freq(basis, 1, 0)) + TrigPoly::cosine(freq(basis, 0, 1)) +
                 TrigPoly::constant(basis, ExactComplex(-2));
    return p;
}

}  // namespace

TEST_CASE("evaluation basics") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly two_exp = TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1)) +
                       TrigPoly::harmonic(freq(basis, 0, 1), ExactComplex(1));
    auto r0 = two_exp.eval(0.0);
    REQUIRE(std::abs(r0.value - Cplx(2.0, 0.0)) < 1e-14);

    auto ex2 = example2_coefficient(basis);
    REQUIRE(std::abs(ex2.eval(0.0).value) < 1e-14);

    TrigPoly e_it = TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1));
    auto rq = e_it.eval(M_PI / 2);
    REQUIRE(std::abs(rq.value - Cplx(0.0, 1.0)) < 1e-12);
    REQUIRE(rq.error_bound < 1e-12);
}

TEST_CASE("algebra: products, conjugate, real part") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0), root2 = freq(basis, 0, 1);
    TrigPoly e_it = TrigPoly::harmonic(one, ExactComplex(1));
    TrigPoly e_mit = TrigPoly::harmonic(-one, ExactComplex(1));

    TrigPoly unit = e_it * e_mit;
    REQUIRE(unit == TrigPoly::constant(basis, ExactComplex(1)));

    TrigPoly sum = e_it + TrigPoly::harmonic(root2, ExactComplex(1));
    TrigPoly square = sum * sum;
    TrigPoly expected = TrigPoly::harmonic(one + one, ExactComplex(1)) +
                        TrigPoly::harmonic(one + root2, ExactComplex(2)) +
                        TrigPoly::harmonic(root2 + root2, ExactComplex(1));
    REQUIRE(square == expected);
    for (int k = 0; k < 10; ++k) {
        double t = 0.7 * k;
        Cplx lhs = square.eval(t).value;
        Cplx rhs = sum.eval(t).value * sum.eval(t).value;
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }

    TrigPoly re = e_it.real_part();
    TrigPoly cos_t = TrigPoly::cosine(one);
    REQUIRE(re == cos_t);
}

TEST_CASE("bohr mean and spectrum") {
    auto basis = oracles::one_sqrt2_basis();
    auto ex2 = example2_coefficient(basis);

    REQUIRE(bohr_mean(ex2, Frequency::zero(basis)) == ExactComplex(-2));
    REQUIRE(bohr_mean(TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1)), freq(basis, 0, 1)).is_zero());

    auto spec = bohr_spectrum(ex2);
    REQUIRE(spec.size() == 5);
    REQUIRE(spec.count(Frequency::zero(basis)) == 1);
    REQUIRE(spec.count(freq(basis, 1, 0)) == 1);
    REQUIRE(spec.count(freq(basis, -1, 0)) == 1);
    REQUIRE(spec.count(freq(basis, 0, 1)) == 1);
    REQUIRE(spec.count(freq(basis, 0, -1)) == 1);

    TrigPoly pair = TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1)) +
                    TrigPoly::harmonic(freq(basis, 0, 1), ExactComplex(1));
    auto spec2 = bohr_spectrum(pair);
    REQUIRE(spec2.size() == 2);
    REQUIRE(bohr_spectrum(TrigPoly::zero(basis)).empty());

    // nonzero mean iff in spectrum
    for (const auto& f : spec) REQUIRE_FALSE(bohr_mean(ex2, f).is_zero());
}

TEST_CASE("bohr mean agrees with the quadrature definition") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly cos_t = TrigPoly::cosine(freq(basis, 1, 0));
    double T = 200.0;
    Cplx integral = oracles::integrate(
        [&](double t) { return std::exp(Cplx(0.0, -t)) * cos_t.eval(t).value; }, -T, T, 1e-9);
    Cplx mean = integral / (2.0 * T);
    REQUIRE(std::abs(mean - Cplx(0.5, 0.0)) < 5e-3);
    REQUIRE(bohr_mean(cos_t, freq(basis, 1, 0)) == ExactComplex(Rational(1, 2)));
}

TEST_CASE("certification against a semi-module") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0), root2 = freq(basis, 0, 1);
    SemiModule lambda(basis, {one, root2});

    REQUIRE_NOTHROW(certify_in_lambda(TrigPoly::constant(basis, ExactComplex(5)), lambda, 4));
    REQUIRE_NOTHROW(certify_in_lambda(TrigPoly::harmonic(one + root2, ExactComplex(1)), lambda, 4));

    try {
        certify_in_lambda(TrigPoly::harmonic(-one, ExactComplex(1)), lambda, 50);
        FAIL("expected CertificationError");
    } catch (const CertificationError& e) {
        REQUIRE(e.exact_negative);
        REQUIRE(e.offending_frequencies.size() == 1);
        REQUIRE(e.offending_frequencies[0] == -one);
    }
}

TEST_CASE("ring axioms hold exactly on random polynomials") {
    auto basis = oracles::one_sqrt2_basis();
    oracles::RandomPolySource src(basis, 7);
    for (int k = 0; k < 60; ++k) {
        TrigPoly p = src.poly(), q = src.poly(), r = src.poly();
        REQUIRE(p + q == q + p);
        REQUIRE(p * q == q * p);
        REQUIRE((p + q) + r == p + (q + r));
        REQUIRE((p * q) * r == p * (q * r));
        REQUIRE(p * (q + r) == p * q + p * r);
        REQUIRE(p - p == TrigPoly::zero(basis));
    }
}

TEST_CASE("spectrum containment under algebra") {
    auto basis = oracles::one_sqrt2_basis();
    oracles::RandomPolySource src(basis, 11);
    for (int k = 0; k < 40; ++k) {
        TrigPoly p = src.poly(), q = src.poly();
        auto sp = bohr_spectrum(p), sq = bohr_spectrum(q);

        auto sum_spec = bohr_spectrum(p + q);
        for (const auto& f : sum_spec) REQUIRE((sp.count(f) == 1 || sq.count(f) == 1));

        std::set<Frequency> sumset;
        for (const auto& a : sp)
            for (const auto& b : sq) sumset.insert(a + b);
        for (const auto& f : bohr_spectrum(p * q)) REQUIRE(sumset.count(f) == 1);
    }
}

TEST_CASE("evaluation respects algebra within reported bounds") {
    auto basis = oracles::one_sqrt2_basis();
    oracles::RandomPolySource src(basis, 13);
    for (int k = 0; k < 1000; ++k) {
        TrigPoly p = src.poly(3), q = src.poly(3);
        double t = src.uniform(-20.0, 20.0);
        auto rp = p.eval(t), rq = q.eval(t), rpq = (p * q).eval(t);
        double lhs = std::abs(rpq.value - rp.value * rq.value);
        double budget = rpq.error_bound + rp.error_bound * std::abs(rq.value) +
                        rq.error_bound * std::abs(rp.value) + rp.error_bound * rq.error_bound + 1e-10;
        REQUIRE(lhs <= budget);
    }
}

TEST_CASE("products stay inside a certified semi-module") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0), root2 = freq(basis, 0, 1);
    SemiModule lambda(basis, {one, root2});
    TrigPoly p = TrigPoly::harmonic(one, ExactComplex(2)) + TrigPoly::constant(basis, ExactComplex(1));
    TrigPoly q = TrigPoly::harmonic(root2, ExactComplex::i()) +
                 TrigPoly::harmonic(one + root2, ExactComplex(1));
    REQUIRE_NOTHROW(certify_in_lambda(p, lambda, 8));
    REQUIRE_NOTHROW(certify_in_lambda(q, lambda, 8));
    REQUIRE_NOTHROW(certify_in_lambda(p * q, lambda, 8));
}

TEST_CASE("matrix polynomials pool frequencies and multiply by convolution") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0);
    MatrixTrigPoly m(basis, 2, 2);
    m.at(0, 0) = TrigPoly::cosine(one);
    m.at(0, 1) = TrigPoly::constant(basis, ExactComplex(1));
    m.at(1, 0) = TrigPoly::zero(basis);
    m.at(1, 1) = TrigPoly::harmonic(one, ExactComplex::i());

    auto pooled = m.pooled_spectrum();
    REQUIRE(pooled.size() == 3);  // {-1, 0, 1}

    MatrixTrigPoly sq = m * m;
    // entry (0,0) = cos^2 t: spectrum {-2, 0, 2}
    auto s00 = sq.at(0, 0).spectrum();
    REQUIRE(s00.count(freq(basis, 2, 0)) == 1);
    REQUIRE(s00.count(Frequency::zero(basis)) == 1);
    REQUIRE(sq.at(0, 0).coefficient(Frequency::zero(basis)) == ExactComplex(Rational(1, 2)));

    REQUIRE(m.sup_norm_upper_bound() >= Rational(2));
    REQUIRE_THROWS_AS(m + MatrixTrigPoly(basis, 1, 1), std::invalid_argument);
}

TEST_CASE("compression charges dropped mass") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly p = TrigPoly::constant(basis, ExactComplex(1)) +
                 TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(Rational(1, 1000000)));
    Rational dropped;
    TrigPoly c = p.compressed(Rational(1, 1000), &dropped);
    REQUIRE(c.term_count() == 1);
    // the dropped mass is a certified upper bound on the removed coefficient
    REQUIRE(dropped >= Rational(1, 1000000));
    REQUIRE(dropped <= Rational(1, 1000000) * Rational(1000000001, 1000000000));
    for (double t : {0.0, 1.0, 2.5}) {
        REQUIRE(std::abs(c.eval(t).value - p.eval(t).value) <= apstab::to_double(dropped) + 1e-15);
    }
}
