#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "apstab/apcalc.hpp"
#include "oracles.hpp"

using namespace apstab;
using oracles::Cplx;

namespace {

Frequency freq(const BasisPtr& basis, int ones, int roots) {
    return Frequency(basis, {Rational(ones), Rational(roots)});
}

}  // namespace

TEST_CASE("derivative is exact and term-wise") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0);
    TrigPoly e_it = TrigPoly::harmonic(one, ExactComplex(1));

    REQUIRE(derivative(e_it) == TrigPoly::harmonic(one, ExactComplex::i()));
    REQUIRE(derivative(TrigPoly::constant(basis, ExactComplex(7))).is_zero());

    TrigPoly sin_t = TrigPoly::sine(one);
    TrigPoly cos_t = TrigPoly::cosine(one);
    TrigPoly d = derivative(sin_t);
    REQUIRE(d == cos_t);
    for (int k = 0; k < 10; ++k) {
        double t = 0.37 * k;
        REQUIRE(std::abs(d.eval(t).value - std::cos(t)) < 1e-12);
    }
}

TEST_CASE("antiderivative: closed form, normalization, error path") {
    auto basis = oracles::one_sqrt2_basis();
    Frequency one = freq(basis, 1, 0);

    TrigPoly g = antiderivative(TrigPoly::harmonic(one, ExactComplex(1)));
    // (e^(it) - 1)/i = -i e^(it) + i
    TrigPoly expected = TrigPoly::harmonic(one, ExactComplex(ExactReal(), ExactReal(Rational(-1)))) +
                        TrigPoly::constant(basis, ExactComplex::i());
    REQUIRE(g == expected);
    REQUIRE(std::abs(g.eval(0.0).value) < 1e-15);

    TrigPoly bad = TrigPoly::constant(basis, ExactComplex(1)) + TrigPoly::harmonic(one, ExactComplex(1));
    REQUIRE_THROWS_AS(antiderivative(bad), UnboundedAntiderivativeError);

    REQUIRE(antiderivative(TrigPoly::zero(basis)).is_zero());
}

TEST_CASE("antiderivative matches quadrature over [0, 50]") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly p = TrigPoly::cosine(freq(basis, 1, 0)) +
                 TrigPoly::cosine(freq(basis, 0, 1), ExactComplex(Rational(1, 2))) +
                 TrigPoly::sine(freq(basis, 1, 1), ExactComplex::i());
    TrigPoly g = antiderivative(p);
    for (double t : {0.5, 3.0, 12.75, 27.0, 50.0}) {
        Cplx oracle = oracles::integrate([&](double s) { return p.eval(s).value; }, 0.0, t, 1e-11);
        REQUIRE(std::abs(g.eval(t).value - oracle) < 1e-8);
    }
}

TEST_CASE("derivative undoes antiderivative exactly on random polynomials") {
    auto basis = oracles::one_sqrt2_basis();
    oracles::RandomPolySource src(basis, 23);
    int done = 0;
    while (done < 500) {
        TrigPoly p = src.poly(4, /*allow_zero_freq=*/false);
        TrigPoly g = antiderivative(p);
        REQUIRE(derivative(g) == p);
        // sigma_b(g) within sigma_b(p) plus {0}
        auto sp = bohr_spectrum(p);
        for (const auto& f : bohr_spectrum(g)) {
            REQUIRE((f.is_zero() || sp.count(f) == 1));
        }
        ++done;
    }
}

TEST_CASE("ap_exponential: trivial, oracle match, certified error") {
    auto basis = oracles::one_sqrt2_basis();

    ApExponential one = ap_exponential(TrigPoly::zero(basis), Rational(1, Integer(1000000000)));
    REQUIRE(one.value.approx == TrigPoly::constant(basis, ExactComplex(1)));
    REQUIRE(one.value.sup_error <= Rational(1, Integer(1000000000)));

    // g = (e^(it)-1)/i: e^g compared against direct scalar exponentiation
    TrigPoly g = antiderivative(TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1)));
    Rational tol(1, Integer(100000000));
    ApExponential eg = ap_exponential(g, tol);
    double budget = apstab::to_double(eg.value.sup_error);
    REQUIRE(budget <= 1e-8);
    oracles::RandomPolySource src(basis, 31);
    for (int k = 0; k < 1000; ++k) {
        double t = src.uniform(-30.0, 30.0);
        Cplx direct = std::exp(g.eval(t).value);
        auto approx = eg.value.approx.eval(t);
        REQUIRE(std::abs(approx.value - direct) <= budget + approx.error_bound + 1e-10);
    }

    REQUIRE_THROWS_AS(ap_exponential(g, Rational(0)), std::invalid_argument);
}

TEST_CASE("ap_exponential spectrum stays in the generated semi-module") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly a = TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1)) +
                 TrigPoly::harmonic(freq(basis, 0, 1), ExactComplex(1));
    TrigPoly g = antiderivative(a);  // sigma_b(g) = {0, 1, sqrt2}
    ApExponential eg = ap_exponential(g, Rational(1, 1000000));
    SemiModule lambda(basis, {freq(basis, 1, 0), freq(basis, 0, 1)});
    REQUIRE_NOTHROW(certify_in_lambda(eg.value.approx, lambda, eg.order + 1));
}

TEST_CASE("exponential is multiplicative within combined error bounds") {
    auto basis = oracles::one_sqrt2_basis();
    TrigPoly g = TrigPoly::sine(freq(basis, 1, 0));
    TrigPoly h = TrigPoly::sine(freq(basis, 0, 1), ExactComplex(Rational(1, 2)));
    Rational tol(1, 10000000);
    ApExponential eg = ap_exponential(g, tol);
    ApExponential eh = ap_exponential(h, tol);
    ApExponential egh = ap_exponential(g + h, tol);
    double bound = apstab::to_double(egh.value.sup_error) +
                   apstab::to_double(eg.value.sup_error * eh.value.target_sup_bound()) +
                   apstab::to_double(eh.value.sup_error * eg.value.target_sup_bound());
    for (double t : {0.0, 0.9, 4.2, 17.3, -6.5}) {
        Cplx lhs = egh.value.approx.eval(t).value;
        Cplx rhs = eg.value.approx.eval(t).value * eh.value.approx.eval(t).value;
        REQUIRE(std::abs(lhs - rhs) <= bound + 1e-9);
    }
}
