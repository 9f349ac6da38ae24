#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/evolve.hpp"
#include "apstab/harmonic.hpp"
#include "apstab/verdicts.hpp"

namespace apstab {

class AperiodicSystemError : public std::domain_error {
public:
    AperiodicSystemError(Frequency freq, const Rational& tau)
        : std::domain_error("system is not periodic with period " + std::to_string(apstab::to_double(tau)) +
                            ": frequency " + freq.str() + " is not an integer multiple of 2 pi / period"),
          frequency(std::move(freq)) {}
    Frequency frequency;
};

/// Exact periodicity test: every coefficient frequency must be an integer
/// multiple of 2 pi / tau. Decided in the exact constant ring.
inline void require_periodic(const MatrixTrigPoly& a, const Rational& tau) {
    if (tau <= 0) throw std::invalid_argument("require_periodic: period must be positive");
    ExactReal two_pi_inv = ExactReal::pi(Rational(1, 2), -1);  // 1/(2 pi)
    for (const auto& f : a.pooled_spectrum()) {
        ExactReal cycles = f.value() * ExactReal(tau) * two_pi_inv;
        if (!cycles.is_integer()) throw AperiodicSystemError(f, tau);
    }
}

/// Monodromy operator P = U(tau, 0) of a verified tau-periodic system.
inline MatrixXcd monodromy(const MatrixTrigPoly& a, const std::optional<MatrixXcd>& a0, const Rational& tau,
                           const IntegratorOptions& opt = {}) {
    require_periodic(a, tau);
    LinearSystem system(a0, a);
    return propagator_matrix(system, 0.0, apstab::to_double(tau), opt).matrix;
}

struct CircleSpectrum {
    std::vector<std::complex<double>> hits;       // | |xi| - 1 | <= tol
    std::vector<std::complex<double>> near_hits;  // just inside, within the near band
    std::vector<std::complex<double>> all_eigenvalues;
};

/// Unit-circle part of sigma(P). Always a finite list in finite dimension;
/// empty is the strongest outcome.
inline CircleSpectrum circle_spectrum(const MatrixXcd& p, double tol = 1e-6, double near_band = 1e-3) {
    if (tol <= 0) throw std::invalid_argument("circle_spectrum: tol must be positive");
    CircleSpectrum out;
    out.all_eigenvalues = eigenvalues_of(p);
    for (const auto& xi : out.all_eigenvalues) {
        double gap = std::abs(std::abs(xi) - 1.0);
        if (gap <= tol)
            out.hits.push_back(xi);
        else if (std::abs(xi) < 1.0 && gap <= near_band)
            out.near_hits.push_back(xi);
    }
    return out;
}

enum class PowerTrend { Decaying, Bounded, Growing };

inline const char* to_string(PowerTrend t) {
    switch (t) {
        case PowerTrend::Decaying: return "decaying";
        case PowerTrend::Bounded: return "bounded";
        case PowerTrend::Growing: return "growing";
    }
    return "?";
}

struct PowerBound {
    double sup = 0;
    std::vector<double> norms;  // ||P^n||, n = 1..N
    PowerTrend trend = PowerTrend::Bounded;
};

/// sup_{1<=n<=N} ||P^n|| with a trend classification from the tail slope of
/// log ||P^n||.
inline PowerBound power_bound(const MatrixXcd& p, unsigned n_max = 200, unsigned tail = 50) {
    if (n_max < 1) throw std::invalid_argument("power_bound: N must be >= 1");
    PowerBound out;
    MatrixXcd acc = p;
    out.norms.reserve(n_max);
    for (unsigned n = 1; n <= n_max; ++n) {
        if (n > 1) acc = acc * p;
        double norm = operator_norm(acc);
        out.norms.push_back(norm);
        out.sup = std::max(out.sup, norm);
    }
    unsigned start = n_max > tail ? n_max - tail : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = 0;
    for (unsigned i = start; i < n_max; ++i) {
        double x = double(i + 1), y = std::log(std::max(out.norms[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    double denom = double(m) * sxx - sx * sx;
    double slope = denom != 0 ? (double(m) * sxy - sx * sy) / denom : 0.0;
    const double margin = 2e-3;
    out.trend = slope > margin    ? PowerTrend::Growing
                : slope < -margin ? PowerTrend::Decaying
                                  : PowerTrend::Bounded;
    return out;
}

class SingularResolventError : public std::runtime_error {
public:
    SingularResolventError(double alpha)
        : std::runtime_error("resolvent solve singular at alpha = " + std::to_string(alpha)), alpha(alpha) {}
    double alpha;
};

struct ResolventLimitCheck {
    std::vector<std::pair<double, double>> values;  // (alpha, |lambda - xi0| ||R(lambda,P) x0||)
    bool pass = false;
};

/// Discrete vanishing-resolvent condition at a unit-circle point xi0, probed
/// radially along lambda = xi0 e^alpha.
inline ResolventLimitCheck resolvent_limit_check(const MatrixXcd& p, std::complex<double> xi0,
                                                 const VectorXcd& x0, const std::vector<Rational>& alphas,
                                                 const TrendRule& rule = {}) {
    ResolventLimitCheck out;
    const auto n = p.rows();
    std::vector<double> values;
    for (const auto& alpha_q : alphas) {
        double alpha = apstab::to_double(alpha_q);
        if (alpha <= 0) throw std::invalid_argument("resolvent_limit_check: alphas must be positive");
        std::complex<double> lambda = xi0 * std::exp(alpha);
        MatrixXcd shifted = lambda * MatrixXcd::Identity(n, n) - p;
        Eigen::JacobiSVD<MatrixXcd> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double smin = svd.singularValues()(n - 1);
        double smax = svd.singularValues()(0);
        if (smin <= 0 || smax / smin > kSingularConditionThreshold) throw SingularResolventError(alpha);
        VectorXcd y = svd.solve(x0);
        double value = std::abs(lambda - xi0) * y.norm();
        out.values.emplace_back(alpha, value);
        values.push_back(value);
    }
    out.pass = rule.pass(values, alphas.empty() ? Rational(1) : alphas.back());
    return out;
}

struct BridgeResult {
    VectorXcd x0;            // the period integral of the damped forcing
    VectorXcd u0;            // R(e^((i lambda0 + alpha) tau), P) x0
    double periodicity_defect;  // || v(tau) - u(0) || for the re-propagated solution
};

/// The bridge between the continuous resolvent solution and the monodromy
/// resolvent: u(0) = R(e^((i lambda0+alpha) tau), P) x0 with x0 the damped
/// period integral of the forcing. Cross-checked by propagating u(0) through
/// one period, which must return to itself.
inline BridgeResult periodic_resolvent_bridge(const EvolutionProcess& process, const MatrixXcd& p,
                                              double lambda0, const Rational& alpha_q,
                                              const SampledFunction& f, const Rational& tau) {
    double alpha = apstab::to_double(alpha_q);
    if (alpha <= 0) throw std::invalid_argument("periodic_resolvent_bridge: alpha must be positive");
    double tau_d = apstab::to_double(tau);
    std::complex<double> shift(alpha, lambda0);
    auto forcing = [&](double t) { return f.interpolate(std::min(t, f.t_end())); };
    const auto n = p.rows();

    // x0 = int_0^tau e^(-(i l0+a)(tau-s)) U(tau,s) f(s) ds: the tau-state of
    // w' = (A(t) - (i l0 + a)) w + f, w(0) = 0.
    VectorXcd zero = VectorXcd::Zero(n);
    BridgeResult out;
    out.x0 = rk_propagate_forced(process.system(), 0.0, tau_d, zero, shift, forcing, process.options()).state;

    // u(0) is the fixed point of one damped period map:
    // u(0) = e^(-lambda tau) P u(0) + x0, i.e. u(0) = R(z, P) (z x0), z = e^(lambda tau).
    std::complex<double> z = std::exp(shift * tau_d);
    MatrixXcd shifted = z * MatrixXcd::Identity(n, n) - p;
    Eigen::JacobiSVD<MatrixXcd> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(n - 1);
    double smax = svd.singularValues()(0);
    if (smin <= 0 || smax / smin > kSingularConditionThreshold) throw SingularResolventError(alpha);
    out.u0 = svd.solve((z * out.x0).eval());

    VectorXcd v_tau =
        rk_propagate_forced(process.system(), 0.0, tau_d, out.u0, shift, forcing, process.options()).state;
    out.periodicity_defect = (v_tau - out.u0).norm();
    return out;
}

struct PeriodicConfig {
    IntegratorOptions integrator;
    double gamma_tol = 1e-6;
    double near_band = 1e-3;
    unsigned power_iterations = 200;
    unsigned power_tail = 50;
    std::vector<Rational> alphas = {Rational(1), Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
    TrendRule trend{1.05, 0.1, 1e-12, Rational(1, 100)};
};

struct MonodromyReport {
    MatrixXcd p;
    Rational tau;
    CircleSpectrum spectrum;
    PowerBound powers;
    /// One diagnostic per (unit-circle point, basis vector).
    struct Diagnostic {
        std::complex<double> xi0;
        size_t basis_index;
        ResolventLimitCheck check;
    };
    std::vector<Diagnostic> diagnostics;
    StabilityClass verdict = StabilityClass::Inconclusive;
    std::vector<ConditionRecord> conditions;
};

/// Full periodic pipeline: monodromy, unit-circle spectrum, power bound and
/// per-orbit resolvent limits over a basis; strongly stable only when every
/// condition passes.
inline MonodromyReport periodic_stability_verdict(const MatrixTrigPoly& a,
                                                  const std::optional<MatrixXcd>& a0, const Rational& tau,
                                                  const PeriodicConfig& config = {}) {
    MonodromyReport report;
    report.tau = tau;
    report.p = monodromy(a, a0, tau, config.integrator);
    report.spectrum = circle_spectrum(report.p, config.gamma_tol, config.near_band);
    report.powers = power_bound(report.p, config.power_iterations, config.power_tail);
    const auto n = report.p.rows();

    {
        ConditionRecord rec;
        rec.name = "power_bound";
        rec.anchor = "sup_n ||P^n|| < infinity";
        rec.status = report.powers.trend == PowerTrend::Growing ? CheckStatus::Fail : CheckStatus::Pass;
        rec.evidence["sup"] = report.powers.sup;
        rec.notes = std::string("trend: ") + to_string(report.powers.trend);
        report.conditions.push_back(std::move(rec));
    }
    {
        ConditionRecord rec;
        rec.name = "circle_spectrum_countable";
        rec.anchor = "sigma(P) on the unit circle is countable";
        rec.status = CheckStatus::Pass;  // finite dimension: always a finite list
        rec.evidence["hits"] = double(report.spectrum.hits.size());
        rec.evidence["near_hits"] = double(report.spectrum.near_hits.size());
        report.conditions.push_back(std::move(rec));
    }

    bool all_limits_pass = true;
    for (const auto& xi0 : report.spectrum.hits) {
        for (Eigen::Index j = 0; j < n; ++j) {
            VectorXcd e = VectorXcd::Zero(n);
            e(j) = 1.0;
            MonodromyReport::Diagnostic diag{xi0, size_t(j),
                                             resolvent_limit_check(report.p, xi0, e, config.alphas,
                                                                   config.trend)};
            if (!diag.check.pass) all_limits_pass = false;
            report.diagnostics.push_back(std::move(diag));
        }
    }
    {
        ConditionRecord rec;
        rec.name = "resolvent_limit";
        rec.anchor = "lim_{lambda->xi0} (lambda-xi0) R(lambda,P) x0 = 0 for each unit-circle xi0";
        rec.status = report.spectrum.hits.empty() ? CheckStatus::Pass
                     : all_limits_pass            ? CheckStatus::Pass
                                                  : CheckStatus::Fail;
        rec.evidence["diagnostics"] = double(report.diagnostics.size());
        if (report.spectrum.hits.empty()) rec.notes = "no unit-circle spectrum: vacuously satisfied";
        report.conditions.push_back(std::move(rec));
    }

    if (report.powers.trend == PowerTrend::Growing) {
        report.verdict = StabilityClass::Unbounded;
    } else if (all_limits_pass) {
        report.verdict = StabilityClass::StronglyStable;
    } else {
        report.verdict = StabilityClass::BoundedAlmostPeriodic;  // bounded periodic orbit persists
    }
    return report;
}

}  // namespace apstab
