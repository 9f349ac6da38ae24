#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "apstab/apcalc.hpp"
#include "apstab/harmonic.hpp"
#include "oracles.hpp"

using namespace apstab;
using oracles::Cplx;

namespace {

Frequency freq(const BasisPtr& basis, int ones, int roots) {
    return Frequency(basis, {Rational(ones), Rational(roots)});
}

MatrixXcd scalar_matrix(Cplx v) {
    MatrixXcd m(1, 1);
    m(0, 0) = v;
    return m;
}

double ode_residual(const MatrixXcd& a0, Cplx mu, const MatrixTrigPoly& f, const MatrixTrigPoly& u,
                    const std::vector<double>& times) {
    // residual u' - (A0 - mu) u - f evaluated entrywise
    double worst = 0;
    for (double t : times) {
        for (size_t r = 0; r < u.rows(); ++r) {
            Cplx du = derivative(u.at(r, 0)).eval(t).value;
            Cplx rhs = -f.at(r, 0).eval(t).value + mu * u.at(r, 0).eval(t).value;
            for (size_t c = 0; c < u.rows(); ++c) rhs -= a0(r, c) * u.at(c, 0).eval(t).value;
            worst = std::max(worst, std::abs(du + rhs));
        }
    }
    return worst;
}

std::vector<double> times() {
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) out.push_back(50.0 * i / 199.0);
    return out;
}

}  // namespace

TEST_CASE("autonomous resolvent solves harmonic-wise") {
    auto basis = oracles::one_sqrt2_basis();

    // u' = -u + e^(it): u = (1-i)/2 e^(it)
    MatrixTrigPoly f1(basis, 1, 1);
    f1.at(0, 0) = TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1));
    auto r1 = autonomous_resolvent(scalar_matrix({-1.0, 0.0}), {0.0, 0.0}, f1);
    Cplx c = r1.solution.at(0, 0).coefficient(freq(basis, 1, 0)).to_complex();
    REQUIRE(std::abs(c - Cplx(0.5, -0.5)) < 1e-12);
    REQUIRE(ode_residual(scalar_matrix({-1.0, 0.0}), {0.0, 0.0}, f1, r1.solution, times()) < 1e-10);

    // stationary solve -A0^-1 f for diag(-1,-2) and f = (1,1)
    MatrixXcd a0 = MatrixXcd::Zero(2, 2);
    a0(0, 0) = -1.0;
    a0(1, 1) = -2.0;
    MatrixTrigPoly f2(basis, 2, 1);
    f2.at(0, 0) = TrigPoly::constant(basis, ExactComplex(1));
    f2.at(1, 0) = TrigPoly::constant(basis, ExactComplex(1));
    auto r2 = autonomous_resolvent(a0, {0.0, 0.0}, f2);
    REQUIRE(std::abs(r2.solution.at(0, 0).eval(0.0).value - Cplx(1.0, 0.0)) < 1e-14);
    REQUIRE(std::abs(r2.solution.at(1, 0).eval(0.0).value - Cplx(0.5, 0.0)) < 1e-14);
    REQUIRE(ode_residual(a0, {0.0, 0.0}, f2, r2.solution, times()) < 1e-10);

    // 0 in sigma(A0) - i*0: singular harmonic
    MatrixTrigPoly f3(basis, 1, 1);
    f3.at(0, 0) = TrigPoly::constant(basis, ExactComplex(1));
    REQUIRE_THROWS_AS(autonomous_resolvent(scalar_matrix({0.0, 0.0}), {0.0, 0.0}, f3),
                      SingularHarmonicError);
}

TEST_CASE("solvability boundary matches the spectrum lattice") {
    auto basis = oracles::one_sqrt2_basis();
    MatrixXcd a0 = MatrixXcd::Zero(2, 2);
    a0(0, 0) = -1.0;
    a0(1, 1) = Cplx(-2.0, 1.0);

    MatrixTrigPoly f(basis, 2, 1);
    f.at(0, 0) = TrigPoly::constant(basis, ExactComplex(1)) +
                 TrigPoly::harmonic(freq(basis, 1, 0), ExactComplex(1));
    f.at(1, 0) = TrigPoly::harmonic(freq(basis, 0, 1), ExactComplex::i());

    std::vector<double> forcing_freqs{0.0, 1.0, std::sqrt(2.0)};
    std::vector<Cplx> eigs{{-1.0, 0.0}, {-2.0, 1.0}};
    // exact hits fail with SingularHarmonic
    for (const auto& eta : eigs) {
        for (double lam : forcing_freqs) {
            Cplx mu = eta - Cplx(0.0, lam);
            REQUIRE_THROWS_AS(autonomous_resolvent(a0, mu, f), SingularHarmonicError);
        }
    }
    // off-lattice points succeed with tiny residual
    for (double re : {-0.5, 0.3}) {
        for (double im : {-0.7, 0.4}) {
            Cplx mu(re, im);
            auto sol = autonomous_resolvent(a0, mu, f);
            REQUIRE(ode_residual(a0, mu, f, sol.solution, times()) < 1e-10);
        }
    }
}

TEST_CASE("spectrum lattice enumeration") {
    auto basis = oracles::one_sqrt2_basis();

    SemiModule trivial(basis, {});
    auto l1 = spectrum_lattice(scalar_matrix({-1.0, 0.0}), trivial, 5);
    REQUIRE(l1.size() == 1);
    REQUIRE(std::abs(l1[0] - Cplx(-1.0, 0.0)) < 1e-14);

    SemiModule ones(basis, {freq(basis, 1, 0)});
    auto l2 = spectrum_lattice(scalar_matrix({-1.0, 0.0}), ones, 2);
    REQUIRE(l2.size() == 3);  // -1, -1-i, -1-2i
    for (const auto& p : {Cplx(-1, 0), Cplx(-1, -1), Cplx(-1, -2)}) {
        bool found = false;
        for (const auto& q : l2) found = found || std::abs(p - q) < 1e-12;
        REQUIRE(found);
    }

    MatrixXcd a0 = MatrixXcd::Zero(2, 2);
    a0(0, 0) = -1.0;
    a0(1, 1) = Cplx(-2.0, 1.0);
    SemiModule roots(basis, {freq(basis, 0, 1)});
    auto l3 = spectrum_lattice(a0, roots, 1);
    REQUIRE(l3.size() == 4);
}

TEST_CASE("galerkin truncation structure") {
    auto basis = oracles::one_sqrt2_basis();
    std::vector<Frequency> lattice{freq(basis, -1, 0), Frequency::zero(basis), freq(basis, 1, 0)};

    // A = 0: block diagonal with eigenvalues -1 + i, -1, -1 - i
    MatrixTrigPoly zero_a(basis, 1, 1);
    auto t0 = galerkin_generator(scalar_matrix({-1.0, 0.0}), zero_a, lattice);
    REQUIRE(t0.dim() == 3);
    REQUIRE(t0.dropped_couplings == 0);
    auto eigs = eigenvalues_of(t0.matrix);
    for (const auto& p : {Cplx(-1, 1), Cplx(-1, 0), Cplx(-1, -1)}) {
        bool found = false;
        for (const auto& q : eigs) found = found || std::abs(p - q) < 1e-8;
        REQUIRE(found);
    }

    // scalar cos t: two coupling bands of entries 1/2, two couplings dropped at the window edge
    MatrixTrigPoly cos_a(basis, 1, 1);
    cos_a.at(0, 0) = TrigPoly::cosine(freq(basis, 1, 0));
    auto tc = galerkin_generator(scalar_matrix({-1.0, 0.0}), cos_a, lattice);
    REQUIRE(tc.dropped_couplings == 2);
    REQUIRE(std::abs(tc.matrix(1, 0) - Cplx(0.5, 0.0)) < 1e-14);  // -1 -> 0 via +1 harmonic
    REQUIRE(std::abs(tc.matrix(2, 1) - Cplx(0.5, 0.0)) < 1e-14);  // 0 -> 1
    REQUIRE(std::abs(tc.matrix(0, 1) - Cplx(0.5, 0.0)) < 1e-14);  // 0 -> -1 via -1 harmonic
    REQUIRE(std::abs(tc.matrix(1, 2) - Cplx(0.5, 0.0)) < 1e-14);  // 1 -> 0
    REQUIRE(std::abs(tc.matrix(2, 0)) < 1e-14);                   // no -1 -> +1 coupling

    REQUIRE_THROWS_AS(galerkin_generator(scalar_matrix({-1.0, 0.0}), zero_a, {}), std::invalid_argument);
}

TEST_CASE("galerkin spectrum shadows the lattice for A = 0") {
    auto basis = oracles::one_sqrt2_basis();
    MatrixXcd a0 = MatrixXcd::Zero(2, 2);
    a0(0, 0) = Cplx(-1.0, 0.5);
    a0(1, 1) = Cplx(-3.0, -0.25);
    std::vector<Frequency> lattice;
    for (int k = -2; k <= 2; ++k) lattice.push_back(freq(basis, k, 0));
    MatrixTrigPoly zero_a(basis, 2, 2);
    auto trunc = galerkin_generator(a0, zero_a, lattice);
    auto eigs = eigenvalues_of(trunc.matrix);
    REQUIRE(eigs.size() == 10);
    for (const auto& eta : {Cplx(-1.0, 0.5), Cplx(-3.0, -0.25)}) {
        for (int k = -2; k <= 2; ++k) {
            Cplx expected = eta - Cplx(0.0, double(k));
            bool found = false;
            for (const auto& q : eigs) found = found || std::abs(q - expected) < 1e-8;
            REQUIRE(found);
        }
    }
}

TEST_CASE("lattice shift commutes with the truncated generator on the interior") {
    auto basis = oracles::one_sqrt2_basis();
    // module lattice window {-3..3}, shift by +1
    std::vector<Frequency> lattice;
    for (int k = -3; k <= 3; ++k) lattice.push_back(freq(basis, k, 0));
    MatrixTrigPoly a(basis, 1, 1);
    a.at(0, 0) = TrigPoly::cosine(freq(basis, 1, 0), ExactComplex(Rational(1, 3)));
    auto trunc = galerkin_generator(scalar_matrix({-1.0, 0.0}), a, lattice);

    // interior indices: both k and k+1 inside, and couplings of both stay inside
    for (size_t j = 1; j + 2 < lattice.size(); ++j) {
        for (size_t k = 1; k + 2 < lattice.size(); ++k) {
            Cplx shifted = trunc.matrix(k + 1, j + 1);
            Cplx original = trunc.matrix(k, j);
            if (k == j) {
                // diagonal picks up exactly -i * (lattice step)
                REQUIRE(std::abs(shifted - (original - Cplx(0.0, 1.0))) < 1e-12);
            } else {
                REQUIRE(std::abs(shifted - original) < 1e-12);
            }
        }
    }
}

TEST_CASE("resolvent norm sweep") {
    auto basis = oracles::one_sqrt2_basis();
    MatrixTrigPoly zero_a(basis, 1, 1);

    auto t1 = galerkin_generator(scalar_matrix({-1.0, 0.0}), zero_a, {Frequency::zero(basis)});
    auto sweep1 = resolvent_norm_sweep(t1, {{0.0, 0.0}});
    REQUIRE(sweep1[0].resolvent_norm == Catch::Approx(1.0).epsilon(1e-12));

    // an eigenvalue hit is reported as infinite
    auto t2 = galerkin_generator(scalar_matrix({-1.0, 0.0}), zero_a,
                                 {Frequency::zero(basis), freq(basis, 1, 0)});
    auto sweep2 = resolvent_norm_sweep(t2, {Cplx(-1.0, -1.0)});
    REQUIRE(std::isinf(sweep2[0].resolvent_norm));

    // normal case: norm = 1/dist to the eigenvalue set
    MatrixXcd a0 = MatrixXcd::Zero(2, 2);
    a0(0, 0) = -1.0;
    a0(1, 1) = Cplx(0.0, 2.0);
    auto t3 = galerkin_generator(a0, MatrixTrigPoly(basis, 2, 2), {Frequency::zero(basis)});
    for (const auto& z : {Cplx(1.0, 0.0), Cplx(0.5, -0.5), Cplx(-3.0, 1.0)}) {
        double dist = std::min(std::abs(z - Cplx(-1.0, 0.0)), std::abs(z - Cplx(0.0, 2.0)));
        auto sweep = resolvent_norm_sweep(t3, {z});
        REQUIRE(sweep[0].resolvent_norm == Catch::Approx(1.0 / dist).margin(1e-8));
    }
}

TEST_CASE("perturbation radius estimates") {
    auto basis = oracles::one_sqrt2_basis();
    SemiModule trivial(basis, {});
    std::vector<Frequency> lattice{Frequency::zero(basis)};

    auto r1 = perturbation_radius(scalar_matrix({-1.0, 0.0}), {Cplx(0.0, 0.0)}, trivial, lattice);
    REQUIRE(r1.delta0 == Catch::Approx(1.0).epsilon(1e-12));

    auto r2 = perturbation_radius(scalar_matrix({-1.0, 0.0}), {Cplx(1.0, 0.0)}, trivial, lattice);
    REQUIRE(r2.delta0 == Catch::Approx(2.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(
        perturbation_radius(scalar_matrix({-1.0, 0.0}), {Cplx(-1.0, 0.0)}, trivial, lattice),
        std::invalid_argument);

    // Neumann consistency: a perturbation of norm delta0/2 keeps the sweep finite
    std::vector<Frequency> window{freq(basis, -1, 0), Frequency::zero(basis), freq(basis, 1, 0)};
    auto base = perturbation_radius(scalar_matrix({-1.0, 0.0}), {Cplx(0.0, 0.0), Cplx(0.5, 0.5)}, trivial,
                                    window);
    REQUIRE(base.delta0 == Catch::Approx(1.0).epsilon(1e-9));
    MatrixTrigPoly perturb(basis, 1, 1);
    // sup |(1/2) cos t| = delta0 / 2
    perturb.at(0, 0) = TrigPoly::cosine(freq(basis, 1, 0), ExactComplex(Rational(1, 2)));
    auto trunc = galerkin_generator(scalar_matrix({-1.0, 0.0}), perturb, window);
    for (const auto& p : resolvent_norm_sweep(trunc, {Cplx(0.0, 0.0), Cplx(0.5, 0.5)})) {
        REQUIRE(std::isfinite(p.resolvent_norm));
    }
}
