#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/trigpoly.hpp"

namespace apstab {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Operator 2-norm (largest singular value).
inline double operator_norm(const MatrixXcd& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

class StepUnderflowError : public std::runtime_error {
public:
    StepUnderflowError(double reached, double target)
        : std::runtime_error("integrator step underflow at t = " + std::to_string(reached) +
                             " (target " + std::to_string(target) + ")"),
          reached_time(reached),
          target_time(target) {}
    double reached_time;
    double target_time;
};

/// x' = (A0 + A(t)) x with A a matrix trigonometric polynomial. Harmonics are
/// compiled to numeric form once so the right-hand side is cheap.
class LinearSystem {
public:
    LinearSystem(std::optional<MatrixXcd> a0, const MatrixTrigPoly& a) : dim_(a.rows()) {
        if (a.rows() != a.cols()) throw std::invalid_argument("LinearSystem: A(t) must be square");
        if (a0 && (a0->rows() != Eigen::Index(dim_) || a0->cols() != Eigen::Index(dim_)))
            throw std::invalid_argument("LinearSystem: A0 shape mismatch");
        a0_ = a0 ? *a0 : MatrixXcd::Zero(dim_, dim_);
        for (const auto& f : a.pooled_spectrum()) {
            MatrixXcd coeff(dim_, dim_);
            for (size_t r = 0; r < dim_; ++r)
                for (size_t c = 0; c < dim_; ++c) coeff(r, c) = a.at(r, c).coefficient(f).to_complex();
            harmonics_.push_back({f.to_double(), coeff});
        }
        sup_bound_ = apstab::to_double(a.sup_norm_upper_bound()) + operator_norm(a0_);
    }

    static LinearSystem scalar(const TrigPoly& a) {
        return LinearSystem(std::nullopt, MatrixTrigPoly::from_scalar(a));
    }

    size_t dim() const { return dim_; }
    const MatrixXcd& a0() const { return a0_; }

    MatrixXcd coefficient_at(double t) const {
        MatrixXcd m = a0_;
        for (const auto& h : harmonics_) m += h.coeff * std::exp(std::complex<double>(0.0, h.omega * t));
        return m;
    }

    VectorXcd rhs(double t, const VectorXcd& x) const { return coefficient_at(t) * x; }

    /// Crude Lipschitz-scale bound sup ||A0 + A(t)||; used for step seeding.
    double sup_coefficient_bound() const { return sup_bound_; }

private:
    struct Harmonic {
        double omega;
        MatrixXcd coeff;
    };
    size_t dim_;
    MatrixXcd a0_;
    std::vector<Harmonic> harmonics_;
    double sup_bound_;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
};

struct IntegrationResult {
    VectorXcd state;
    double error_estimate = 0;  // accumulated local error estimates
    size_t steps = 0;
};

namespace detail {

/// Adaptive embedded Dormand-Prince 5(4) pair over a generic right-hand side.
/// Deterministic: fixed controller constants, no randomized branches.
inline IntegrationResult dormand_prince(const std::function<VectorXcd(double, const VectorXcd&)>& rhs,
                                        double s, double t, VectorXcd x0, const IntegratorOptions& opt,
                                        double scale_hint) {
    IntegrationResult out;
    out.state = std::move(x0);
    if (t == s) return out;
    if (t < s) throw std::invalid_argument("dormand_prince: requires t >= s");

    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

    double time = s;
    double span = t - s;
    double h = std::min(span, 0.1 / std::max(1.0, scale_hint));
    VectorXcd k1 = rhs(time, out.state);
    while (time < t) {
        if (h < 1e-14 * std::max(1.0, std::abs(time))) throw StepUnderflowError(time, t);
        if (time + h > t) h = t - time;
        const VectorXcd& x = out.state;
        VectorXcd k2 = rhs(time + c2 * h, x + h * (a21 * k1));
        VectorXcd k3 = rhs(time + c3 * h, x + h * (a31 * k1 + a32 * k2));
        VectorXcd k4 = rhs(time + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        VectorXcd k5 = rhs(time + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        VectorXcd k6 = rhs(time + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        VectorXcd x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        VectorXcd k7 = rhs(time + h, x_new);  // FSAL
        VectorXcd err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(x(i)), std::abs(x_new(i)));
            double r = std::abs(err_vec(i)) / scale;
            err += r * r;
        }
        err = std::sqrt(err / double(x.size()));

        if (err <= 1.0) {
            time += h;
            out.state = x_new;
            out.error_estimate += err_vec.norm();
            k1 = k7;
            ++out.steps;
        }
        double factor = 0.9 * std::pow(err > 0 ? 1.0 / err : 1e8, 0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return out;
}

}  // namespace detail

/// Adaptive integration of x' = (A0 + A(t)) x from s to t.
inline IntegrationResult rk_propagate(const LinearSystem& system, double s, double t, const VectorXcd& x0,
                                      const IntegratorOptions& opt = {}) {
    return detail::dormand_prince([&](double tau, const VectorXcd& x) { return system.rhs(tau, x); }, s, t,
                                  x0, opt, system.sup_coefficient_bound());
}

/// Inhomogeneous variant: x' = (A0 + A(t) - shift) x + f(t).
inline IntegrationResult rk_propagate_forced(const LinearSystem& system, double s, double t,
                                             const VectorXcd& x0, std::complex<double> shift,
                                             const std::function<VectorXcd(double)>& forcing,
                                             const IntegratorOptions& opt = {}) {
    return detail::dormand_prince(
        [&](double tau, const VectorXcd& x) -> VectorXcd {
            return system.rhs(tau, x) - shift * x + forcing(tau);
        },
        s, t, x0, opt, system.sup_coefficient_bound() + std::abs(shift));
}

struct PropagatorRecord {
    MatrixXcd matrix;
    double identity_defect = 0;  // ||U(t,t) - I|| at the endpoints
    double cocycle_defect = 0;   // max ||U(t,r)U(r,s) - U(t,s)|| over midpoints
    double error_estimate = 0;
};

/// Full propagator matrix by propagating the basis columns, with the
/// evolutionary-process axioms spot-checked at interior midpoints.
inline PropagatorRecord propagator_matrix(const LinearSystem& system, double s, double t,
                                          const IntegratorOptions& opt = {}, unsigned midpoints = 2) {
    const size_t n = system.dim();
    auto propagate = [&](double a, double b, const MatrixXcd& m) {
        MatrixXcd out(n, n);
        double err = 0;
        for (size_t j = 0; j < n; ++j) {
            IntegrationResult r = rk_propagate(system, a, b, m.col(j), opt);
            out.col(j) = r.state;
            err = std::max(err, r.error_estimate);
        }
        return std::make_pair(out, err);
    };
    PropagatorRecord rec;
    auto [U, err] = propagate(s, t, MatrixXcd::Identity(n, n));
    rec.matrix = U;
    rec.error_estimate = err;
    rec.identity_defect = 0.0;  // U(t,t) = I holds exactly (zero-length integration)
    for (unsigned k = 1; k <= midpoints && t > s; ++k) {
        double r = s + (t - s) * double(k) / double(midpoints + 1);
        auto [Urs, e1] = propagate(s, r, MatrixXcd::Identity(n, n));
        auto [Utr, e2] = propagate(r, t, MatrixXcd::Identity(n, n));
        rec.cocycle_defect = std::max(rec.cocycle_defect, operator_norm(Utr * Urs - U));
    }
    return rec;
}

/// Exponential bound certificate ||U(t,s)|| <= M e^(alpha (t-s)), fitted
/// empirically over the explored sample set (never a proof).
struct BoundCertificate {
    double m = 1.0;
    double alpha = 0.0;
    size_t samples = 0;
};

/// Uniform grid samples of a vector-valued function with cubic interpolation.
struct SampledFunction {
    double t_start = 0;
    double step = 0;
    std::vector<VectorXcd> values;

    size_t size() const { return values.size(); }
    double t_end() const { return t_start + step * double(values.empty() ? 0 : values.size() - 1); }
    double node_time(size_t i) const { return t_start + step * double(i); }

    static SampledFunction from_function(const std::function<VectorXcd(double)>& f, double t0, double t1,
                                         double dt) {
        if (dt <= 0 || t1 < t0) throw std::invalid_argument("SampledFunction: bad grid");
        SampledFunction g;
        g.t_start = t0;
        g.step = dt;
        size_t count = size_t(std::floor((t1 - t0) / dt + 0.5)) + 1;
        g.values.reserve(count);
        for (size_t i = 0; i < count; ++i) g.values.push_back(f(t0 + dt * double(i)));
        return g;
    }

    /// 4-point Lagrange cubic on the uniform grid; exact at the nodes.
    VectorXcd interpolate(double t) const {
        if (values.empty()) throw std::domain_error("SampledFunction: empty");
        double pos = (t - t_start) / step;
        if (pos < -1e-9 || pos > double(values.size() - 1) + 1e-9)
            throw std::domain_error("SampledFunction: query outside grid coverage");
        double rounded = std::round(pos);
        if (std::abs(pos - rounded) < 1e-9 && rounded >= 0 && rounded < double(values.size()))
            return values[size_t(rounded)];
        long k = long(std::floor(pos));
        long i0 = std::clamp(k - 1, 0L, long(values.size()) - 4);
        double u = pos - double(i0);
        VectorXcd acc = VectorXcd::Zero(values[0].size());
        for (long j = 0; j < 4; ++j) {
            double w = 1.0;
            for (long l = 0; l < 4; ++l) {
                if (l != j) w *= (u - double(l)) / (double(j) - double(l));
            }
            acc += w * values[size_t(i0 + j)];
        }
        return acc;
    }
};

/// Numeric two-parameter propagator with its tolerance and fitted bound
/// certificate; the concrete realization of an evolutionary process.
class EvolutionProcess {
public:
    EvolutionProcess(LinearSystem system, IntegratorOptions opt = {})
        : system_(std::move(system)), opt_(opt) {}

    const LinearSystem& system() const { return system_; }
    const IntegratorOptions& options() const { return opt_; }

    VectorXcd apply(double s, double t, const VectorXcd& x0) const {
        return rk_propagate(system_, s, t, x0, opt_).state;
    }
    MatrixXcd propagator(double s, double t) const { return propagator_matrix(system_, s, t, opt_).matrix; }

    const std::optional<BoundCertificate>& certificate() const { return certificate_; }
    void set_certificate(BoundCertificate c) { certificate_ = c; }

private:
    LinearSystem system_;
    IntegratorOptions opt_;
    std::optional<BoundCertificate> certificate_;
};

/// Evolution semigroup action (T^h g)(t) = U(t, t-h) g(t-h) on grid samples.
/// Output nodes are the input nodes t with t-h inside the grid.
inline SampledFunction semigroup_apply(const EvolutionProcess& process, const SampledFunction& g, double h) {
    if (h < 0) throw std::invalid_argument("semigroup_apply: h must be nonnegative");
    if (g.values.empty()) throw std::domain_error("semigroup_apply: empty sample grid");
    size_t first = 0;
    while (first < g.size() && g.node_time(first) - h < g.t_start - 1e-12) ++first;
    if (first == g.size())
        throw std::domain_error("semigroup_apply: grid does not cover [t-h, t] for any node");
    SampledFunction out;
    out.t_start = g.node_time(first);
    out.step = g.step;
    for (size_t i = first; i < g.size(); ++i) {
        double t = g.node_time(i);
        VectorXcd past = g.interpolate(t - h);
        out.values.push_back(h == 0 ? past : process.apply(t - h, t, past));
    }
    return out;
}

struct ScanResult {
    double sup = 0;
    double argmax_s = 0;
    double argmax_t = 0;
    /// Sup over the nested half-horizon; a growth trend indicator.
    double half_horizon_sup = 0;
    bool growth_flag = false;
    BoundCertificate certificate;
    std::vector<std::tuple<double, double, double>> samples;  // (s, t, norm)
};

/// Exhaustive scan of ||U(t,s)|| over the triangle 0 <= s <= t <= horizon.
/// Uses U(t,s) = Phi(t) Phi(s)^-1 with one forward pass for the fundamental
/// matrix, so the cost is quadratic in grid nodes, not integrations.
inline ScanResult sup_norm_scan(const EvolutionProcess& process, double horizon, double grid_step) {
    if (horizon <= 0 || grid_step <= 0) throw std::invalid_argument("sup_norm_scan: bad grid");
    const size_t n = process.system().dim();
    size_t count = size_t(std::floor(horizon / grid_step + 0.5)) + 1;
    std::vector<MatrixXcd> phi;
    phi.reserve(count);
    phi.push_back(MatrixXcd::Identity(n, n));
    for (size_t i = 1; i < count; ++i) {
        double a = grid_step * double(i - 1), b = grid_step * double(i);
        MatrixXcd step(n, n);
        for (size_t j = 0; j < n; ++j)
            step.col(j) = rk_propagate(process.system(), a, b, phi.back().col(j), process.options()).state;
        phi.push_back(step);
    }
    ScanResult out;
    double sum_xy = 0, sum_x = 0, sum_y = 0, sum_xx = 0;
    size_t m = 0;
    for (size_t j = 0; j < count; ++j) {
        MatrixXcd inv_j = Eigen::PartialPivLU<MatrixXcd>(phi[j]).inverse();
        for (size_t i = j; i < count; ++i) {
            MatrixXcd u = phi[i] * inv_j;
            double norm = operator_norm(u);
            double s = grid_step * double(j), t = grid_step * double(i);
            out.samples.emplace_back(s, t, norm);
            if (norm > out.sup) {
                out.sup = norm;
                out.argmax_s = s;
                out.argmax_t = t;
            }
            if (t <= horizon / 2 && norm > out.half_horizon_sup) out.half_horizon_sup = norm;
            double x = t - s, y = std::log(std::max(norm, 1e-300));
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_xy += x * y;
            ++m;
        }
    }
    double denom = double(m) * sum_xx - sum_x * sum_x;
    double alpha = denom != 0 ? (double(m) * sum_xy - sum_x * sum_y) / denom : 0.0;
    double intercept = (sum_y - alpha * sum_x) / double(m);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [s, t, norm] : out.samples)
        worst = std::max(worst, std::log(std::max(norm, 1e-300)) - alpha * (t - s));
    out.certificate = {std::exp(std::max(intercept, worst)), alpha, m};
    out.growth_flag = out.sup > 2.0 * std::max(out.half_horizon_sup, 1e-300);
    return out;
}

enum class DecaySuggestion { Decaying, Bounded, Growing };

inline const char* to_string(DecaySuggestion s) {
    switch (s) {
        case DecaySuggestion::Decaying: return "decaying";
        case DecaySuggestion::Bounded: return "bounded";
        case DecaySuggestion::Growing: return "growing";
    }
    return "?";
}

struct ProbeCurve {
    VectorXcd initial;
    std::vector<std::pair<double, double>> norm_curve;         // (t, ||U(t,s)x0||)
    std::vector<std::pair<double, VectorXcd>> state_curve;     // (t, U(t,s)x0)
    double final_norm = 0;
    DecaySuggestion suggestion = DecaySuggestion::Bounded;
};

struct ProbeResult {
    std::vector<ProbeCurve> curves;
    DecaySuggestion suggestion = DecaySuggestion::Bounded;
};

/// Decay curves ||U(t,s)x0|| with a tail-slope classification over the last
/// quarter of the horizon.
inline ProbeResult stability_probe(const EvolutionProcess& process, const std::vector<VectorXcd>& initials,
                                   double s, double horizon, size_t nodes = 201) {
    if (horizon <= 0 || nodes < 8) throw std::invalid_argument("stability_probe: bad grid");
    ProbeResult out;
    double dt = horizon / double(nodes - 1);
    int rank = 0;
    for (const auto& x0 : initials) {
        ProbeCurve curve;
        curve.initial = x0;
        VectorXcd x = x0;
        for (size_t i = 0; i < nodes; ++i) {
            double t = s + dt * double(i);
            if (i > 0) x = process.apply(t - dt, t, x);
            curve.norm_curve.emplace_back(t, x.norm());
            curve.state_curve.emplace_back(t, x);
        }
        curve.final_norm = curve.norm_curve.back().second;
        // compare the peak over the last quarter against the first quarter;
        // a slope fit is too fragile for oscillating almost periodic norms
        size_t quarter = std::max<size_t>(nodes / 4, 1);
        double head_peak = 0, tail_peak = 0;
        for (size_t i = 0; i < quarter; ++i) head_peak = std::max(head_peak, curve.norm_curve[i].second);
        for (size_t i = nodes - quarter; i < nodes; ++i)
            tail_peak = std::max(tail_peak, curve.norm_curve[i].second);
        if (tail_peak > 10.0 * head_peak)
            curve.suggestion = DecaySuggestion::Growing;
        else if (tail_peak < 1e-3 * head_peak || tail_peak < 1e-12)
            curve.suggestion = DecaySuggestion::Decaying;
        else
            curve.suggestion = DecaySuggestion::Bounded;
        rank = std::max(rank, int(curve.suggestion));
        out.curves.push_back(std::move(curve));
    }
    out.suggestion = DecaySuggestion(rank);
    return out;
}

}  // namespace apstab
