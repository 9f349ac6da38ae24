#pragma once

#include <stdexcept>
#include <string>

#include "apstab/trigpoly.hpp"

namespace apstab {

/// TrigPoly approximation of a non-polynomial target together with a
/// certified uniform error bound.
struct BoundedApprox {
    TrigPoly approx;
    Rational sup_error;

    double sup_error_double() const { return apstab::to_double(sup_error); }
    /// Certified upper bound on the sup norm of the target.
    Rational target_sup_bound() const { return approx.l1_upper_bound() + sup_error; }
};

/// Raised by antiderivative when the mean (frequency-zero coefficient) is
/// nonzero: the primitive then grows linearly and leaves the almost periodic
/// class.
class UnboundedAntiderivativeError : public std::domain_error {
public:
    explicit UnboundedAntiderivativeError(const ExactComplex& mean)
        : std::domain_error("antiderivative: nonzero mean " + mean.str() +
                            " at frequency 0 makes the primitive unbounded"),
          mean(mean) {}
    ExactComplex mean;
};

/// Term-wise derivative: c e^(i lambda t) -> i lambda c e^(i lambda t). Exact.
inline TrigPoly derivative(const TrigPoly& p) {
    TrigPoly out(p.basis());
    for (const auto& [f, c] : p.terms()) {
        if (f.is_zero()) continue;
        out.add_term(f, ExactComplex(ExactReal(), f.value()) * c);
    }
    return out;
}

/// The primitive g(t) = int_0^t p with g(0) = 0, exact, requiring a zero mean.
/// sigma_b(g) is contained in sigma_b(p) plus {0}.
inline TrigPoly antiderivative(const TrigPoly& p) {
    ExactComplex mean = p.coefficient(Frequency::zero(p.basis()));
    if (!mean.is_zero()) throw UnboundedAntiderivativeError(mean);
    TrigPoly out(p.basis());
    ExactComplex constant;  // -sum c_k/(i lambda_k), normalizes g(0) = 0
    for (const auto& [f, c] : p.terms()) {
        ExactComplex inv_i_lambda = ExactComplex(ExactReal(), f.value()).inverse();
        ExactComplex coeff = c * inv_i_lambda;
        out.add_term(f, coeff);
        constant -= coeff;
    }
    out.add_term(Frequency::zero(p.basis()), constant);
    return out;
}

/// The truncated exponential series with bookkeeping needed by consumers
/// that propagate residual bounds.
struct ApExponential {
    BoundedApprox value;
    unsigned order = 0;      // last included power N
    Rational arg_l1_bound;   // B >= sup|g|, the l1 coefficient bound of g
    Rational tail_bound;     // sum_{k>N} B^k/k!
    Rational drop_mass;      // total l1 mass dropped by compression
    Rational last_term;      // B^N/N!, the derivative-defect scale
};

/// Partial sum of e^g = sum g^k / k! with N chosen so the tail
/// sum_{k>N} B^k/k! <= tol, B the l1 coefficient bound of g. Intermediate
/// powers are compressed; every drop is charged to the error budget.
inline ApExponential ap_exponential(const TrigPoly& g, const Rational& tol) {
    if (tol <= 0) throw std::invalid_argument("ap_exponential: tol must be positive");
    Rational B = g.l1_upper_bound();

    // Choose N with tail(N) = sum_{k>N} B^k/k! <= tol/2 via the geometric
    // majorant B^(N+1)/(N+1)! * 1/(1 - B/(N+2)).
    unsigned N = 0;
    Rational term = 1;  // B^0/0!
    Rational tail;
    Rational last_term = 1;
    for (unsigned k = 1;; ++k) {
        term = term * B / k;  // B^k/k!
        if (Rational(k + 1) > B) {
            Rational ratio = B / Rational(k + 1);
            tail = term * ratio / (1 - ratio);
            if (tail <= tol / 2) {
                N = k;
                last_term = term;
                break;
            }
        }
        if (k > 10000) throw std::runtime_error("ap_exponential: series did not converge");
    }

    Rational drop_budget = tol / 2;
    Rational per_step_drop = drop_budget / Rational(4 * (N + 1));

    TrigPoly sum = TrigPoly::constant(g.basis(), ExactComplex(1));
    TrigPoly power = sum;           // g^k/k!, compressed
    Rational power_error = 0;       // sup bound on (g^k/k! - power)
    Rational accumulated_drop = 0;  // total error charged to compression
    for (unsigned k = 1; k <= N; ++k) {
        power = power * g.scaled(ExactComplex(Rational(1, k)));
        power_error = power_error * B / Rational(k);
        Rational dropped;
        power = power.compressed(per_step_drop, &dropped);
        power_error += dropped;
        sum = sum + power;
        accumulated_drop += power_error;
    }
    {
        // final sweep: collected coefficients below the remaining budget go
        // too, and the survivors are rounded to dyadic form so downstream
        // exact arithmetic stays small
        Rational dropped;
        sum = sum.compressed(drop_budget / 4, &dropped);
        accumulated_drop += dropped;
        unsigned bits = 48;
        Rational target = drop_budget / 4;
        while (Rational(Integer(4 * (N + 1) * (sum.term_count() + 1)), Integer(1) << bits) > target)
            bits += 16;
        Rational round_err;
        sum = sum.rounded(bits, &round_err);
        accumulated_drop += round_err;
    }

    ApExponential out;
    out.value.approx = sum;
    out.value.sup_error = tail + accumulated_drop;
    out.order = N;
    out.arg_l1_bound = B;
    out.tail_bound = tail;
    out.drop_mass = accumulated_drop;
    out.last_term = last_term;
    return out;
}

}  // namespace apstab
