#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "apstab/apcalc.hpp"
#include "apstab/verdicts.hpp"

namespace apstab {

/// Raised by solve_resolvent when the dominant-decay precondition
/// Re(lambda) > Re(mean) fails.
class NotApplicableError : public std::domain_error {
public:
    explicit NotApplicableError(const std::string& what) : std::domain_error(what) {}
};

/// Deterministic sample grid for residual checks.
inline std::vector<double> sample_times(size_t count = 200, double t_max = 50.0) {
    std::vector<double> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(t_max * double(i) / double(count - 1));
    return out;
}

/// Scalar equation dx/dt = a(t) x with the mean split off:
/// a = mu0 + a~, G~(t) = int_0^t a~, so int_s^t a = mu0 (t-s) + G~(t) - G~(s).
/// The exponentials e^(+-G~) are truncated once at construction and reused.
class ScalarEquation {
public:
    explicit ScalarEquation(TrigPoly a, Rational exp_tol = Rational(1, Integer(1000000000)))
        : a_(std::move(a)), exp_tol_(std::move(exp_tol)) {
        mu0_ = a_.coefficient(Frequency::zero(a_.basis()));
        a_tilde_ = a_ - TrigPoly::constant(a_.basis(), mu0_);
        g_tilde_ = antiderivative(a_tilde_);
        exp_plus_ = ap_exponential(g_tilde_, exp_tol_);
        exp_minus_ = ap_exponential(-g_tilde_, exp_tol_);
    }

    const TrigPoly& a() const { return a_; }
    const BasisPtr& basis() const { return a_.basis(); }
    const ExactComplex& mean() const { return mu0_; }
    const TrigPoly& zero_mean_part() const { return a_tilde_; }
    const TrigPoly& g_tilde() const { return g_tilde_; }
    const Rational& exp_tol() const { return exp_tol_; }
    const ApExponential& exp_plus() const { return exp_plus_; }
    const ApExponential& exp_minus() const { return exp_minus_; }

    int mean_real_sign() const { return mu0_.re().sign(); }

    /// Certified upper bound on sup |Re G~| (l1 norm of the real part).
    Rational re_g_tilde_bound() const { return g_tilde_.real_part().l1_upper_bound(); }

private:
    TrigPoly a_;
    Rational exp_tol_;
    ExactComplex mu0_;
    TrigPoly a_tilde_;
    TrigPoly g_tilde_;
    ApExponential exp_plus_;
    ApExponential exp_minus_;
};

struct PropagatorValue {
    std::complex<double> value;
    double error_bound;
};

/// Closed form U(t,s) = e^(mu0 (t-s)) e^(G~(t) - G~(s)).
inline PropagatorValue propagator(const ScalarEquation& eq, double s, double t) {
    if (t < s) throw std::invalid_argument("propagator: requires t >= s");
    auto gt = eq.g_tilde().eval(t);
    auto gs = eq.g_tilde().eval(s);
    std::complex<double> mu0 = eq.mean().to_complex();
    std::complex<double> expo = mu0 * (t - s) + gt.value - gs.value;
    std::complex<double> u = std::exp(expo);
    double exp_err = gt.error_bound + gs.error_bound + 64 * std::numeric_limits<double>::epsilon() *
                                                           (1.0 + std::abs(expo));
    return {u, std::abs(u) * (std::exp(exp_err) - 1.0 + 1e-300)};
}

struct SupBound {
    bool bounded = false;
    double bound = 0;           // e^(2 B~) when bounded
    Rational b_tilde;           // l1 bound of Re G~
    std::string reason;
};

/// sup_{t>=s} |U(t,s)|: bounded iff Re mu0 <= 0, with the envelope e^(2 B~).
inline SupBound sup_propagator_bound(const ScalarEquation& eq) {
    SupBound out;
    out.b_tilde = eq.re_g_tilde_bound();
    int sign = eq.mean_real_sign();
    if (sign > 0) {
        out.bounded = false;
        out.reason = "Re mean > 0: |U(t,s)| >= e^(Re mu0 (t-s) - 2 B~) grows without bound";
        return out;
    }
    out.bounded = true;
    out.bound = std::exp(2.0 * apstab::to_double(out.b_tilde));
    out.reason = sign < 0 ? "Re mean < 0: |U(t,s)| <= e^(Re mu0 (t-s) + 2 B~) decays"
                          : "Re mean = 0: |U(t,s)| <= e^(2 B~), almost periodic propagator";
    return out;
}

enum class SpectrumRoute { DiscreteSpectrum, MeanExtraction, Autonomous, Inapplicable };

inline const char* to_string(SpectrumRoute r) {
    switch (r) {
        case SpectrumRoute::DiscreteSpectrum: return "discrete_spectrum";
        case SpectrumRoute::MeanExtraction: return "mean_extraction";
        case SpectrumRoute::Autonomous: return "autonomous";
        case SpectrumRoute::Inapplicable: return "inapplicable";
    }
    return "?";
}

struct SpectrumBounds {
    unsigned long membership_bound = kDefaultSearchBound;
    Rational eps = kDefaultDiscretenessEps;
};

/// Localization of the equation spectrum Sigma = sigma(G) on the imaginary
/// axis. The inclusion Sigma within -i Lambda or i Lambda is asserted only
/// when the hypotheses verify; otherwise a fallback route or inapplicability
/// is recorded.
class SpectrumReport {
public:
    SpectrumReport(const ScalarEquation& eq, const SpectrumBounds& bounds = {})
        : lambda_(SemiModule::from_spectrum(eq.basis(), eq.a().spectrum())),
          mu0_(eq.mean()),
          bounds_(bounds) {
        zero_in_spectrum_ = !eq.a().coefficient(Frequency::zero(eq.basis())).is_zero();
        discreteness_ = lambda_.discreteness_check(bounds.membership_bound, bounds.eps);
        bool a_constant = eq.zero_mean_part().is_zero();
        if (a_constant) {
            route_ = SpectrumRoute::Autonomous;
            conclusion_ = true;
            description_ =
                "constant coefficient: the spectrum on the imaginary axis is at most the single point "
                "i Im(mean); countable";
        } else if (discreteness_.verdict == Discreteness::Discrete && !zero_in_spectrum_) {
            route_ = SpectrumRoute::DiscreteSpectrum;
            conclusion_ = true;
            description_ =
                "Lambda discrete and 0 not in sigma_b(a): Sigma is discrete, countable, and contained in "
                "-i Lambda union i Lambda";
        } else if (zero_in_spectrum_ && mu0_.re().sign() != 0) {
            route_ = SpectrumRoute::MeanExtraction;
            conclusion_ = true;
            description_ =
                "0 in sigma_b(a) with Re mean != 0: after extracting the mean, the inhomogeneous equation "
                "has a unique bounded solution for every i lambda with lambda outside Lambda, so Sigma is "
                "contained in i Lambda; countable (finitely generated semi-module)";
        } else {
            route_ = SpectrumRoute::Inapplicable;
            conclusion_ = false;
            description_ = discreteness_.verdict == Discreteness::NonDiscrete
                               ? "Lambda is not discrete: no localization of Sigma is asserted"
                               : "hypotheses not verified: no localization of Sigma is asserted";
        }
    }

    const SemiModule& lambda() const { return lambda_; }
    const DiscretenessResult& discreteness() const { return discreteness_; }
    bool zero_in_spectrum() const { return zero_in_spectrum_; }
    SpectrumRoute route() const { return route_; }
    /// True when a countable localization of Sigma was established.
    bool conclusion_applicable() const { return conclusion_; }
    const std::string& description() const { return description_; }
    const ExactComplex& mean() const { return mu0_; }

    struct CandidateMembership {
        bool in_candidate_set = false;
        MembershipResult positive;  // beta in Lambda
        MembershipResult negative;  // -beta in Lambda
    };

    /// Membership oracle for a candidate spectral point i beta.
    CandidateMembership candidate(const Frequency& beta) const {
        CandidateMembership out;
        out.positive = lambda_.member(beta, bounds_.membership_bound);
        out.negative = lambda_.member(-beta, bounds_.membership_bound);
        if (route_ == SpectrumRoute::MeanExtraction)
            out.in_candidate_set = out.positive.member;  // candidate set i Lambda
        else
            out.in_candidate_set = out.positive.member || out.negative.member;
        return out;
    }

private:
    SemiModule lambda_;
    ExactComplex mu0_;
    SpectrumBounds bounds_;
    bool zero_in_spectrum_ = false;
    DiscretenessResult discreteness_;
    SpectrumRoute route_ = SpectrumRoute::Inapplicable;
    bool conclusion_ = false;
    std::string description_;
};

struct ResolventOptions {
    Rational tol = Rational(1, Integer(1000000000));  // drives the exponential truncation
    bool expand_solution = false;                     // build the full product P*S
    bool bounds_only = false;                         // norms and defects only, no factors
    unsigned precision_bits = 192;
};

/// Shared state for repeated solves against one forcing (the ergodic sweep
/// varies only the real part of the spectral parameter).
struct ResolventWorkspace {
    ApExponential p, q;
    TrigPoly w;  // compressed Q f
    Rational w_drop;
    /// Per-term (|c| upper bound, |Im(lambda - mu0) + nu| lower bound) in the
    /// map order of w; valid for every solve sharing Im(lambda).
    std::vector<std::pair<Rational, Rational>> term_bounds;
};

/// Solution of u' = (a - lambda) u + f in factored form u = P * S with
/// P ~ e^(G~) and S the term-wise integrated part. Pointwise evaluation and
/// residual checks work on the factors; the expanded polynomial is optional.
class ResolventSolution {
public:
    ResolventSolution(const ScalarEquation& eq, ExactComplex lambda, TrigPoly f, ResolventOptions opt,
                      const ResolventWorkspace* workspace = nullptr)
        : eq_(&eq), lambda_(std::move(lambda)), f_(std::move(f)), opt_(std::move(opt)) {
        ExactReal delta = lambda_.re() - eq.mean().re();
        if (delta.sign() <= 0)
            throw NotApplicableError(
                "solve_resolvent: requires Re(lambda) > Re(mean) for the Perron integral to converge");
        if (opt_.tol <= 0) throw std::invalid_argument("solve_resolvent: tol must be positive");
        build(delta, workspace);
    }

    const ExactComplex& lambda() const { return lambda_; }
    const TrigPoly& forcing() const { return f_; }

    /// Certified upper bound on sup |u|.
    const Rational& sup_norm_bound() const { return sup_norm_bound_; }
    /// Certified upper bound on sup |u' - (a - lambda) u - f|.
    const Rational& residual_bound() const {
        if (opt_.bounds_only) throw std::logic_error("ResolventSolution: built in bounds-only mode");
        return residual_bound_;
    }
    bool unique() const { return true; }
    const std::string& uniqueness_justification() const { return justification_; }

    std::complex<double> eval(double t) const {
        if (opt_.bounds_only) throw std::logic_error("ResolventSolution: built in bounds-only mode");
        return p_.value.approx.eval(t).value * s_.eval(t).value;
    }

    /// Residual evaluated pointwise through the factored identity
    /// residual = (P' - a~ P) S + P W~ - f; no polynomial products needed.
    std::complex<double> residual_eval(double t) const {
        if (opt_.bounds_only) throw std::logic_error("ResolventSolution: built in bounds-only mode");
        std::complex<double> Pt = p_.value.approx.eval(t).value;
        std::complex<double> Dt = exponential_derivative().eval(t).value -
                                  eq_->zero_mean_part().eval(t).value * Pt;
        std::complex<double> St = s_.eval(t).value;
        std::complex<double> Wt = w_tilde_.eval(t).value;
        std::complex<double> ft = f_.eval(t).value;
        return Dt * St + Pt * Wt - ft;
    }

    double max_residual(const std::vector<double>& times) const {
        double worst = 0;
        for (double t : times) worst = std::max(worst, std::abs(residual_eval(t)));
        return worst;
    }

    /// Expanded u as a bounded approximation (built on demand).
    const BoundedApprox& expanded() const {
        if (!expanded_) throw std::logic_error("ResolventSolution: solution was not expanded");
        return *expanded_;
    }
    bool has_expanded() const { return expanded_.has_value(); }

    const TrigPoly& integrated_factor() const { return s_; }
    const ApExponential& exponential_factor() const { return p_; }

private:
    void build(const ExactReal& delta, const ResolventWorkspace* workspace) {
        const ScalarEquation& eq = *eq_;

        // rational lower bound on delta = Re(lambda - mu0) > 0
        Rational delta_lb;
        for (unsigned bits = 96;; bits *= 2) {
            RationalInterval enc = delta.enclosure(bits);
            if (enc.lo > 0) {
                delta_lb = enc.lo;
                break;
            }
            if (bits > 16384) throw std::runtime_error("solve_resolvent: could not bound delta away from 0");
        }

        TrigPoly w;
        Rational w_drop = 0;
        Rational l1P, l1Q;
        if (workspace) {
            p_ = workspace->p;
            q_ = workspace->q;
            w = workspace->w;
            w_drop = workspace->w_drop;
            l1P = p_.value.approx.l1_upper_bound();
            l1Q = q_.value.approx.l1_upper_bound();
        } else {
            // exponentials: reuse the equation cache unless a tighter tol is asked
            if (opt_.tol < eq.exp_tol()) {
                p_ = ap_exponential(eq.g_tilde(), opt_.tol);
                q_ = ap_exponential(-eq.g_tilde(), opt_.tol);
            } else {
                p_ = eq.exp_plus();
                q_ = eq.exp_minus();
            }
            l1P = p_.value.approx.l1_upper_bound();
            l1Q = q_.value.approx.l1_upper_bound();
            w = q_.value.approx * f_;
            // small terms of Q f are dropped before the division; the loss is
            // charged like any other forcing-side error (amplified by 1/delta)
            w = w.compressed(opt_.tol * delta_lb / (4 * (1 + l1P)), &w_drop);
        }
        Rational l1f = f_.l1_upper_bound();
        Rational eP = p_.value.sup_error;
        Rational eQ = q_.value.sup_error;

        // The inverse of each small denominator is rounded to dyadic form;
        // coefficient defects are tracked through cheap valid upper bounds.
        unsigned qbits = 48;
        {
            Rational target = opt_.tol * delta_lb / (8 * (1 + l1P) * Rational(w.term_count() + 1));
            while (Rational(1, Integer(1) << qbits) > target && qbits < 4096) qbits += 16;
        }
        ExactComplex shift = lambda_ - eq.mean();
        Rational shift_ub = shift.abs_upper_fast();
        s_ = TrigPoly(eq.basis());
        w_tilde_ = TrigPoly(eq.basis());
        Rational s_coeff_defect = 0;       // sum |q^_nu - c_nu / d_nu|
        Rational w_tilde_defect = 0;       // sum |q^_nu d_nu - c_nu|
        Rational l1S = 0;                  // sum |q^_nu| (valid upper bounds)
        if (opt_.bounds_only) {
            // no factors are materialized: the exact quotients need only
            // |c| / |d| with |d|^2 >= delta^2 + |Im d|^2, all certified
            ExactReal im_shift = lambda_.im() - eq.mean().im();
            Rational delta_sq = delta_lb * delta_lb;
            const std::vector<std::pair<Rational, Rational>>* bounds = nullptr;
            std::vector<std::pair<Rational, Rational>> local;
            if (workspace && workspace->term_bounds.size() == w.term_count()) {
                bounds = &workspace->term_bounds;
            } else {
                local.reserve(w.term_count());
                for (const auto& [nu, c] : w.terms()) {
                    RationalInterval im_enc = (im_shift + nu.value()).enclosure(64);
                    local.emplace_back(c.abs_upper_fast(), im_enc.abs_lower());
                }
                bounds = &local;
            }
            for (const auto& [c_ub, im_lb] : *bounds) {
                double nsq = apstab::to_double(delta_sq + im_lb * im_lb);
                if (nsq > 0 && std::isfinite(nsq)) {
                    double inv_abs_ub = (1.0 + 1e-9) / std::sqrt(nsq);
                    l1S += c_ub * rational_from_double(inv_abs_ub);
                } else {
                    l1S += c_ub / delta_lb;
                }
            }
        } else {
            for (const auto& [nu, c] : w.terms()) {
                ExactReal nu_value = nu.value();
                ExactComplex denom = shift + ExactComplex(ExactReal(), nu_value);
                auto [inv_hat, inv_err] = certified_inverse(denom, qbits, delta_lb);
                Rational c_ub = c.abs_upper_fast();
                Rational term_defect = c_ub * inv_err;  // |c| |1/d - inv^|
                s_coeff_defect += term_defect;
                w_tilde_defect += (shift_ub + nu_value.abs_upper_fast()) * term_defect;
                ExactComplex qhat = c * inv_hat;
                s_.add_term(nu, qhat);
                // W~ = S' - (mu0 - lambda) S; its coefficient is exactly q^ d
                w_tilde_.add_term(nu, qhat * denom);
                l1S += qhat.abs_upper_fast();
            }
        }
        // the derivative of P is only needed for pointwise residuals; built lazily

        // || u_true - P S || <= eP ||I[e^-G f]|| + ||P|| (angle defects)
        Rational i_norm_true = (l1Q + eQ) * l1f / delta_lb;
        Rational s_defect = (eQ * l1f + w_drop) / delta_lb + s_coeff_defect;
        approx_error_ = eP * i_norm_true + l1P * s_defect;
        sup_norm_bound_ = l1P * l1S + approx_error_;

        // ||P' - a~ P|| without expanding the product: the pure series
        // telescopes to -a~ G~^N/N!; compression drops contribute through
        // their derivatives, bounded by the largest window frequency.
        Rational l1a = eq.zero_mean_part().l1_upper_bound();
        Rational max_freq = 0;
        for (const auto& [g, c] : eq.g_tilde().terms())
            max_freq = std::max(max_freq, g.value().abs_upper());
        Rational omega = max_freq * Rational(p_.order);
        Rational d_bound = l1a * p_.last_term + (omega + l1a) * p_.drop_mass;

        // ||P W~ - f|| <= ||P|| ||W~ - W|| + ||(P Q - 1) f|| + dropped W mass
        Rational expB = exp_rational_upper(q_.arg_l1_bound);
        Rational pq_defect = eP * expB + l1P * eQ;
        residual_bound_ =
            d_bound * l1S + l1P * (w_tilde_defect + w_drop) + pq_defect * l1f;

        std::ostringstream just;
        just << "Re(lambda - mean) >= " << apstab::to_double(delta_lb)
             << " > 0: the kernel e^((mu0-lambda)(t-s)) decays, the Perron integral converges absolutely, "
                "and every homogeneous solution grows backward in time, so the bounded solution is unique";
        justification_ = just.str();

        if (opt_.expand_solution) {
            Rational budget = opt_.tol / 4;
            Rational dropP, dropS;
            TrigPoly pc = p_.value.approx.compressed(budget / (1 + l1S), &dropP);
            TrigPoly sc = s_.compressed(budget / (1 + l1P), &dropS);
            BoundedApprox e;
            e.approx = pc * sc;
            e.sup_error = approx_error_ + dropP * l1S + dropS * (l1P + dropP);
            expanded_ = std::move(e);
        }
    }

    /// Dyadic-rounded inverse with a certified bound on |1/d - inv^|.
    /// Exact ring inversion when available; otherwise a Gaussian-rational
    /// approximation through interval enclosures (pi-mixed denominators).
    std::pair<ExactComplex, Rational> certified_inverse(const ExactComplex& d, unsigned qbits,
                                                        const Rational& delta_lb) const {
        try {
            auto [inv_hat, round_err] = d.inverse().rounded(qbits);
            return {std::move(inv_hat), round_err};
        } catch (const std::domain_error&) {
        }
        unsigned bits = opt_.precision_bits;
        for (;; bits *= 2) {
            RationalInterval re = d.re().enclosure(bits);
            RationalInterval im = d.im().enclosure(bits);
            RationalInterval nsq = re * re + im * im;
            if (nsq.lo > 0) {
                Rational inv_n = Rational(1) / nsq.midpoint();
                ExactComplex q(ExactReal(re.midpoint() * inv_n), ExactReal(-(im.midpoint() * inv_n)));
                ExactComplex residue = ExactComplex(1) - q * d;  // exact
                // |1/d - q| = |1 - q d| / |d| <= residue_ub / delta
                Rational r_ub = residue.abs_upper(64);
                auto [q_hat, round_err] = q.rounded(qbits);
                return {std::move(q_hat), r_ub / delta_lb + round_err};
            }
            if (bits > 16384) throw std::runtime_error("certified_inverse: denominator too close to zero");
        }
    }

    static Rational exp_rational_upper(const Rational& b) {
        if (b >= 32) {
            // e^b <= 4^b <= 4^ceil(b); the series loop below would truncate
            Integer c = rational_num(b) / rational_den(b) + 1;
            Rational out = 1;
            for (Integer k = 0; k < c; ++k) out *= 4;
            return out;
        }
        Rational sum = 1, term = 1;
        for (unsigned k = 1; k <= 128; ++k) {
            term = term * b / k;
            sum += term;
            if (Rational(k + 1) > b && term / (1 - b / Rational(k + 1)) < Rational(1, 1000000)) {
                sum += term;  // absorbs the tail
                break;
            }
        }
        return sum + 1;
    }

    const TrigPoly& exponential_derivative() const {
        if (auto p = std::atomic_load(&dp_cache_)) return *p;
        auto built = std::make_shared<const TrigPoly>(derivative(p_.value.approx));
        std::shared_ptr<const TrigPoly> expected;
        if (!std::atomic_compare_exchange_strong(&dp_cache_, &expected,
                                                 std::shared_ptr<const TrigPoly>(built)))
            built = expected;
        return *std::atomic_load(&dp_cache_);
    }

    const ScalarEquation* eq_;
    ExactComplex lambda_;
    TrigPoly f_;
    ResolventOptions opt_;

    ApExponential p_, q_;
    TrigPoly s_;
    TrigPoly w_tilde_;
    mutable std::shared_ptr<const TrigPoly> dp_cache_;
    Rational approx_error_;
    Rational sup_norm_bound_;
    Rational residual_bound_;
    std::string justification_;
    std::optional<BoundedApprox> expanded_;
};

inline ResolventSolution solve_resolvent(const ScalarEquation& eq, const ExactComplex& lambda,
                                         const TrigPoly& f, const ResolventOptions& opt = {}) {
    return ResolventSolution(eq, lambda, f, opt);
}

struct ErgodicProbe {
    Rational alpha;
    double value;  // alpha * (certified sup bound of u_{lambda+alpha,f})
};

struct ErgodicCheckResult {
    std::vector<ErgodicProbe> probes;
    bool pass = false;
    std::string notes;
};

/// The vanishing-resolvent condition lim_{alpha -> 0} alpha u_{lambda+alpha,f} = 0,
/// probed along a decreasing alpha sequence.
inline ErgodicCheckResult ergodic_check(const ScalarEquation& eq, const ExactComplex& lambda,
                                        const TrigPoly& f, const std::vector<Rational>& alphas,
                                        const TrendRule& rule = {}, const ResolventOptions& base_opt = {}) {
    ErgodicCheckResult out;
    std::vector<double> values;
    // the forcing-side work is shared: only the spectral shift varies with alpha
    std::optional<ResolventWorkspace> workspace;
    for (const auto& alpha : alphas) {
        if (alpha <= 0) throw std::invalid_argument("ergodic_check: alphas must be positive");
        ExactComplex shifted = lambda + ExactComplex(ExactReal(alpha));
        ResolventOptions opt = base_opt;
        opt.expand_solution = false;
        opt.bounds_only = true;
        if (!workspace) {
            ResolventWorkspace ws;
            if (opt.tol < eq.exp_tol()) {
                ws.p = ap_exponential(eq.g_tilde(), opt.tol);
                ws.q = ap_exponential(-eq.g_tilde(), opt.tol);
            } else {
                ws.p = eq.exp_plus();
                ws.q = eq.exp_minus();
            }
            ws.w = ws.q.value.approx * f;
            // budget on the value scale: the dropped mass enters the scaled
            // norm as alpha l1P w_drop / delta <= l1P w_drop since delta >= alpha
            ws.w = ws.w.compressed(opt.tol / (4 * (1 + ws.p.value.approx.l1_upper_bound())), &ws.w_drop);
            ExactReal im_shift = lambda.im() - eq.mean().im();
            ws.term_bounds.reserve(ws.w.term_count());
            for (const auto& [nu, c] : ws.w.terms()) {
                RationalInterval im_enc = (im_shift + nu.value()).enclosure(64);
                ws.term_bounds.emplace_back(c.abs_upper_fast(), im_enc.abs_lower());
            }
            workspace = std::move(ws);
        }
        ResolventSolution sol(eq, shifted, f, opt, &*workspace);
        double value = apstab::to_double(Rational(alpha) * sol.sup_norm_bound());
        out.probes.push_back({alpha, value});
        values.push_back(value);
    }
    out.pass = rule.pass(values, alphas.empty() ? Rational(1) : alphas.back());
    if (!out.pass && !values.empty()) {
        std::ostringstream os;
        os << "sequence did not decay: first " << values.front() << ", final " << values.back();
        out.notes = os.str();
    }
    return out;
}

struct StabilityConfig {
    std::vector<Rational> alphas = {Rational(1), Rational(1, 10), Rational(1, 100)};
    TrendRule trend;
    SpectrumBounds spectrum_bounds;
    // probe solves compare scaled norms against coarse thresholds; a loose
    // truncation tolerance is ample and much cheaper
    ResolventOptions resolvent{Rational(1, 1000000), false, false, 192};
    size_t max_lambda_probes = 5;
    size_t max_forcing_probes = 8;
};

struct StabilityResult {
    StabilityClass verdict = StabilityClass::Inconclusive;
    std::vector<ConditionRecord> conditions;
    std::optional<SpectrumReport> spectrum;
};

namespace detail {

/// Probe forcings: constants, generator exponentials, and degree-2 products.
inline std::vector<TrigPoly> default_forcing_probes(const ScalarEquation& eq, size_t cap) {
    std::vector<TrigPoly> probes;
    probes.push_back(TrigPoly::constant(eq.basis(), ExactComplex(1)));
    std::vector<Frequency> gens;
    for (const auto& f : eq.a().spectrum())
        if (!f.is_zero()) gens.push_back(f);
    for (const auto& g : gens) {
        if (probes.size() >= cap) return probes;
        probes.push_back(TrigPoly::harmonic(g, ExactComplex(1)));
    }
    for (size_t i = 0; i < gens.size() && probes.size() < cap; ++i) {
        for (size_t j = i; j < gens.size() && probes.size() < cap; ++j) {
            Frequency sum = gens[i] + gens[j];
            probes.push_back(TrigPoly::harmonic(sum, ExactComplex(1)));
        }
    }
    return probes;
}

/// Probe spectral points: 0, the generator frequencies (as +-i g), and for a
/// constant equation the actual candidate i Im(mean).
inline std::vector<ExactComplex> default_lambda_probes(const ScalarEquation& eq, size_t cap) {
    std::vector<ExactComplex> probes;
    probes.push_back(ExactComplex(0));
    if (eq.zero_mean_part().is_zero() && !eq.mean().im().is_zero())
        probes.push_back(ExactComplex(ExactReal(), eq.mean().im()));
    for (const auto& f : eq.a().spectrum()) {
        if (probes.size() >= cap) break;
        if (f.is_zero()) continue;
        probes.push_back(ExactComplex(ExactReal(), f.value()));
    }
    return probes;
}

}  // namespace detail

/// Assembles the strong-stability verdict for the scalar equation:
/// the three checkable conditions (uniform propagator bound, countable
/// spectrum localization, vanishing-resolvent limit over a probe set)
/// plus the exact mean trichotomy.
inline StabilityResult stability_verdict(const ScalarEquation& eq, const StabilityConfig& config = {}) {
    StabilityResult out;
    int mean_sign = eq.mean_real_sign();

    // condition: uniform bound on the propagator
    SupBound sup = sup_propagator_bound(eq);
    {
        ConditionRecord rec;
        rec.name = "propagator_sup_bound";
        rec.anchor = "sup_{t>=s} |U(t,s)| < infinity";
        rec.status = sup.bounded ? CheckStatus::Pass : CheckStatus::Fail;
        rec.evidence["re_mean"] = apstab::to_double(eq.mean().re().enclosure(96).midpoint());
        rec.evidence["b_tilde"] = apstab::to_double(sup.b_tilde);
        if (sup.bounded) rec.evidence["bound"] = sup.bound;
        rec.notes = sup.reason;
        out.conditions.push_back(std::move(rec));
    }

    // condition: countable localization of the spectrum
    out.spectrum.emplace(eq, config.spectrum_bounds);
    {
        ConditionRecord rec;
        rec.name = "spectrum_countable";
        rec.anchor = "Sigma = sigma(G) on iR is countable";
        rec.status = out.spectrum->conclusion_applicable() ? CheckStatus::Pass : CheckStatus::Fail;
        rec.evidence["zero_in_spectrum"] = out.spectrum->zero_in_spectrum() ? 1.0 : 0.0;
        rec.evidence["discrete"] =
            out.spectrum->discreteness().verdict == Discreteness::Discrete ? 1.0 : 0.0;
        rec.notes = std::string(to_string(out.spectrum->route())) + ": " + out.spectrum->description();
        out.conditions.push_back(std::move(rec));
    }

    // condition: ergodic limit over the probe set
    {
        ConditionRecord rec;
        rec.name = "ergodic_limit";
        rec.anchor = "lim_{alpha->0} alpha u_{lambda+alpha,f} = 0 for probed (lambda, f)";
        if (mean_sign > 0) {
            rec.status = CheckStatus::NotApplicable;
            rec.notes = "propagator unbounded; the limit condition presupposes a bounded process";
        } else {
            auto lambdas = detail::default_lambda_probes(eq, config.max_lambda_probes);
            auto forcings = detail::default_forcing_probes(eq, config.max_forcing_probes);
            size_t passed = 0, total = 0;
            double worst_final = 0;
            for (const auto& lam : lambdas) {
                for (const auto& f : forcings) {
                    ErgodicCheckResult r = ergodic_check(eq, lam, f, config.alphas, config.trend,
                                                         config.resolvent);
                    ++total;
                    if (r.pass) ++passed;
                    if (!r.probes.empty()) worst_final = std::max(worst_final, r.probes.back().value);
                }
            }
            rec.status = passed == total ? CheckStatus::Pass : CheckStatus::Fail;
            rec.evidence["probes"] = double(total);
            rec.evidence["passed"] = double(passed);
            rec.evidence["worst_final_value"] = worst_final;
        }
        out.conditions.push_back(std::move(rec));
    }

    // exact trichotomy on the mean
    if (mean_sign > 0) {
        out.verdict = StabilityClass::Unbounded;
    } else if (mean_sign == 0) {
        out.verdict = StabilityClass::BoundedAlmostPeriodic;
        ConditionRecord rec;
        rec.name = "almost_periodic_propagator";
        rec.anchor = "U(t,s) = e^(G~(t)-G~(s)) with G~ almost periodic";
        rec.status = CheckStatus::Info;
        rec.notes = "zero-mean coefficient: the propagator is almost periodic and bounded both ways";
        out.conditions.push_back(std::move(rec));
    } else {
        ConditionRecord rec;
        rec.name = "decay_envelope";
        rec.anchor = "|U(t,s)| <= e^(Re mu0 (t-s) + 2 B~) -> 0";
        rec.status = CheckStatus::Pass;
        rec.evidence["re_mean"] = apstab::to_double(eq.mean().re().enclosure(96).midpoint());
        rec.evidence["envelope_constant"] = sup.bounded ? sup.bound : 0.0;
        out.conditions.push_back(std::move(rec));
        bool all_pass = true;
        for (const auto& c : out.conditions)
            if (c.status == CheckStatus::Fail) all_pass = false;
        out.verdict = all_pass ? StabilityClass::StronglyStable : StabilityClass::Inconclusive;
    }
    return out;
}

}  // namespace apstab
