#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/evolve.hpp"
#include "apstab/semimodule.hpp"
#include "apstab/trigpoly.hpp"

namespace apstab {

inline constexpr double kSingularConditionThreshold = 1e12;

class SingularHarmonicError : public std::runtime_error {
public:
    SingularHarmonicError(Frequency freq, double distance)
        : std::runtime_error("resolvent singular at forcing frequency " + freq.str() +
                             " (distance to spectrum " + std::to_string(distance) + ")"),
          frequency(std::move(freq)),
          distance_to_spectrum(distance) {}
    Frequency frequency;
    double distance_to_spectrum;
};

inline std::vector<std::complex<double>> eigenvalues_of(const MatrixXcd& m) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(m, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(es.eigenvalues().data(),
                                          es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

/// Harmonic-wise solution of u' = (A0 - mu) u + f for a matrix-polynomial
/// forcing: u_k = ((mu + i lambda_k) I - A0)^-1 f_k, exact term structure.
/// Fails with SingularHarmonic exactly when mu + i lambda_k hits sigma(A0),
/// i.e. mu lies on the lattice sigma(A0) - i lambda_k.
struct AutonomousResolvent {
    MatrixTrigPoly solution;
    double max_residual_scale;  // largest condition-scaled solve defect
};

inline AutonomousResolvent autonomous_resolvent(const MatrixXcd& a0, std::complex<double> mu,
                                                const MatrixTrigPoly& f, double singular_distance = 1e-9) {
    const auto n = a0.rows();
    if (a0.cols() != n) throw std::invalid_argument("autonomous_resolvent: A0 must be square");
    if (f.rows() != size_t(n)) throw std::invalid_argument("autonomous_resolvent: forcing height mismatch");
    auto eigs = eigenvalues_of(a0);
    AutonomousResolvent out{MatrixTrigPoly(f.basis(), f.rows(), f.cols()), 0.0};
    for (const auto& freq : f.pooled_spectrum()) {
        std::complex<double> z = mu + std::complex<double>(0.0, freq.to_double());
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& eta : eigs) dist = std::min(dist, std::abs(z - eta));
        if (dist < singular_distance) throw SingularHarmonicError(freq, dist);
        MatrixXcd shifted = z * MatrixXcd::Identity(n, n) - a0;
        Eigen::PartialPivLU<MatrixXcd> lu(shifted);
        for (size_t c = 0; c < f.cols(); ++c) {
            VectorXcd fk(n);
            for (Eigen::Index r = 0; r < n; ++r)
                fk(r) = f.at(size_t(r), c).coefficient(freq).to_complex();
            VectorXcd uk = lu.solve(fk);
            out.max_residual_scale = std::max(out.max_residual_scale, (shifted * uk - fk).norm());
            for (Eigen::Index r = 0; r < n; ++r) {
                std::complex<double> v = uk(r);
                if (std::abs(v) == 0.0) continue;
                out.solution.at(size_t(r), c).add_term(
                    freq, ExactComplex(ExactReal(rational_from_double(v.real())),
                                       ExactReal(rational_from_double(v.imag()))));
            }
        }
    }
    return out;
}

/// The lattice sigma(A0) - i * (truncated semi-module), deduplicated within tol.
inline std::vector<std::complex<double>> spectrum_lattice(const MatrixXcd& a0, const SemiModule& lambda,
                                                          unsigned long bound, double dedup_tol = 1e-12) {
    std::vector<std::complex<double>> out;
    auto eigs = eigenvalues_of(a0);
    for (const auto& eta : eigs) {
        for (const auto& freq : lambda.truncate(bound)) {
            std::complex<double> p = eta - std::complex<double>(0.0, freq.to_double());
            bool dup = false;
            for (const auto& q : out)
                if (std::abs(p - q) <= dedup_tol) {
                    dup = true;
                    break;
                }
            if (!dup) out.push_back(p);
        }
    }
    return out;
}

/// Finite window of the generator G = -d/dt + A0 + M_A in harmonic
/// coordinates: block row k carries -i lambda_k I + A0 on the diagonal and
/// the harmonic coefficient A_m at column j whenever lambda_k = lambda_j + mu_m.
struct GeneratorTruncation {
    std::vector<Frequency> lattice;
    size_t block_dim = 0;
    MatrixXcd matrix;
    size_t dropped_couplings = 0;

    size_t dim() const { return lattice.size() * block_dim; }
};

inline GeneratorTruncation galerkin_generator(const MatrixXcd& a0, const MatrixTrigPoly& a,
                                              const std::vector<Frequency>& lattice) {
    if (lattice.empty()) throw std::invalid_argument("galerkin_generator: empty lattice");
    const size_t n = a.rows();
    if (a.cols() != n || a0.rows() != Eigen::Index(n) || a0.cols() != Eigen::Index(n))
        throw std::invalid_argument("galerkin_generator: shape mismatch");
    for (size_t i = 0; i < lattice.size(); ++i)
        for (size_t j = i + 1; j < lattice.size(); ++j)
            if (lattice[i] == lattice[j])
                throw std::invalid_argument("galerkin_generator: lattice frequencies must be distinct");

    GeneratorTruncation out;
    out.lattice = lattice;
    out.block_dim = n;
    const size_t L = lattice.size();
    out.matrix = MatrixXcd::Zero(L * n, L * n);
    for (size_t k = 0; k < L; ++k) {
        std::complex<double> shift(0.0, -lattice[k].to_double());
        out.matrix.block(k * n, k * n, n, n) =
            a0 + shift * MatrixXcd::Identity(n, n);
    }
    for (const auto& mu : a.pooled_spectrum()) {
        MatrixXcd coeff(n, n);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) coeff(r, c) = a.at(r, c).coefficient(mu).to_complex();
        for (size_t j = 0; j < L; ++j) {
            Frequency target = lattice[j] + mu;
            bool placed = false;
            for (size_t k = 0; k < L; ++k) {
                if (lattice[k] == target) {
                    out.matrix.block(k * n, j * n, n, n) += coeff;
                    placed = true;
                    break;
                }
            }
            if (!placed) ++out.dropped_couplings;
        }
    }
    return out;
}

struct SweepPoint {
    std::complex<double> point;
    double resolvent_norm;  // +infinity at numerically singular points
};

/// ||(z I - G)^-1|| over the given points via the smallest singular value;
/// infinity recorded when the condition estimate crosses the threshold.
inline std::vector<SweepPoint> resolvent_norm_sweep(const GeneratorTruncation& trunc,
                                                    const std::vector<std::complex<double>>& points) {
    std::vector<SweepPoint> out;
    out.reserve(points.size());
    const auto dim = Eigen::Index(trunc.dim());
    for (const auto& z : points) {
        MatrixXcd shifted = z * MatrixXcd::Identity(dim, dim) - trunc.matrix;
        Eigen::JacobiSVD<MatrixXcd> svd(shifted);
        double smin = svd.singularValues()(dim - 1);
        double smax = svd.singularValues()(0);
        double norm = (smin <= 0 || smax / smin > kSingularConditionThreshold)
                          ? std::numeric_limits<double>::infinity()
                          : 1.0 / smin;
        out.push_back({z, norm});
    }
    return out;
}

struct PerturbationRadius {
    double delta0 = 0;
    double max_resolvent_norm = 0;
    size_t lattice_size = 0;  // the estimate is truncation-dependent
};

/// Neumann-series radius delta0 = 1 / max_K ||R(z, G_0)|| on the unperturbed
/// (A = 0) truncation. Reported as a sampled estimate, never a certificate.
inline PerturbationRadius perturbation_radius(const MatrixXcd& a0,
                                              const std::vector<std::complex<double>>& sample_points,
                                              const SemiModule& lambda,
                                              const std::vector<Frequency>& lattice) {
    if (sample_points.empty()) throw std::invalid_argument("perturbation_radius: no sample points");
    MatrixTrigPoly zero_a(lambda.basis(), size_t(a0.rows()), size_t(a0.cols()));
    GeneratorTruncation trunc = galerkin_generator(a0, zero_a, lattice);
    auto sweep = resolvent_norm_sweep(trunc, sample_points);
    PerturbationRadius out;
    out.lattice_size = lattice.size();
    for (const auto& p : sweep) {
        if (!std::isfinite(p.resolvent_norm))
            throw std::invalid_argument("perturbation_radius: sample point lies on the lattice spectrum");
        out.max_resolvent_norm = std::max(out.max_resolvent_norm, p.resolvent_norm);
    }
    out.delta0 = 1.0 / out.max_resolvent_norm;
    return out;
}

}  // namespace apstab
