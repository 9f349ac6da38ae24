#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/frequency.hpp"

namespace apstab {

inline constexpr unsigned long kDefaultSearchBound = 10000;
inline const Rational kDefaultDiscretenessEps = Rational(1, 100);

/// Outcome of a bounded membership search in a semi-module.
struct MembershipResult {
    bool member = false;
    std::vector<Integer> witness;  // coefficients per generator (input order), when member
    unsigned long bound = 0;       // the search bound the verdict is relative to

    static MembershipResult yes(std::vector<Integer> coeffs, unsigned long bound) {
        return {true, std::move(coeffs), bound};
    }
    static MembershipResult not_within(unsigned long bound) { return {false, {}, bound}; }
};

enum class ModuleKind { Module, NotModuleWithin, SemiModuleOnly };

struct ModuleCheckResult {
    ModuleKind kind = ModuleKind::NotModuleWithin;
    /// For Module: per nonzero generator, coefficients expressing its negative.
    std::vector<std::pair<Frequency, std::vector<Integer>>> witnesses;
    std::string certificate;  // for SemiModuleOnly: the exact obstruction
    unsigned long bound = 0;
};

enum class Discreteness { Discrete, NonDiscrete, Unknown };

struct DiscretenessResult {
    Discreteness verdict = Discreteness::Unknown;
    std::optional<Frequency> witness;     // nonzero element with |value| < eps
    std::vector<Integer> witness_coeffs;  // coefficients per generator (input order)
    std::string reason;
    unsigned long bound = 0;
    Rational eps;
};

namespace detail {

struct PreparedGens {
    std::vector<Frequency> gens;   // deduplicated, zeros removed
    std::vector<size_t> original;  // index into the input list
};

inline PreparedGens prepare_generators(const std::vector<Frequency>& gens) {
    PreparedGens out;
    for (size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].is_zero()) continue;
        bool dup = false;
        for (const auto& g : out.gens)
            if (g == gens[i]) {
                dup = true;
                break;
            }
        if (!dup) {
            out.gens.push_back(gens[i]);
            out.original.push_back(i);
        }
    }
    return out;
}

/// Depth-first search for nonnegative integer coefficients with per-coordinate
/// interval pruning and an exact solve at the final generator.
class MemberSearch {
public:
    MemberSearch(const std::vector<Frequency>& gens, unsigned long bound) : gens_(gens), bound_(bound) {
        size_t m = gens.empty() ? 0 : gens[0].basis()->size();
        // suffix per-coordinate reachable ranges: [bound * sum(min(g,0)), bound * sum(max(g,0))]
        suffix_lo_.assign(gens.size() + 1, std::vector<Rational>(m, Rational(0)));
        suffix_hi_.assign(gens.size() + 1, std::vector<Rational>(m, Rational(0)));
        for (size_t i = gens.size(); i-- > 0;) {
            for (size_t j = 0; j < m; ++j) {
                const Rational& c = gens[i].coords()[j];
                suffix_lo_[i][j] = suffix_lo_[i + 1][j] + (c < 0 ? c * Rational(bound) : Rational(0));
                suffix_hi_[i][j] = suffix_hi_[i + 1][j] + (c > 0 ? c * Rational(bound) : Rational(0));
            }
        }
    }

    std::optional<std::vector<Integer>> run(const Frequency& target) {
        coeffs_.assign(gens_.size(), Integer(0));
        if (dfs(target, 0)) return coeffs_;
        return std::nullopt;
    }

private:
    bool feasible(const Frequency& residual, size_t from) const {
        const auto& coords = residual.coords();
        for (size_t j = 0; j < coords.size(); ++j) {
            if (coords[j] < suffix_lo_[from][j] || coords[j] > suffix_hi_[from][j]) return false;
        }
        return true;
    }

    bool dfs(const Frequency& residual, size_t i) {
        if (residual.is_zero()) {
            for (size_t k = i; k < gens_.size(); ++k) coeffs_[k] = 0;
            return true;
        }
        if (i == gens_.size()) return false;
        if (!feasible(residual, i)) return false;
        if (i + 1 == gens_.size()) {
            // exact solve: residual = n * g_i with integer 0 <= n <= bound
            Rational ratio;
            if (!Frequency::rational_ratio(residual, gens_[i], &ratio)) return false;
            if (ratio < 0 || rational_den(ratio) != 1) return false;
            Integer n = rational_num(ratio);
            if (n > bound_) return false;
            coeffs_[i] = n;
            return true;
        }
        Frequency r = residual;
        for (unsigned long n = 0; n <= bound_; ++n) {
            coeffs_[i] = n;
            if (dfs(r, i + 1)) return true;
            r = r - gens_[i];
        }
        return false;
    }

    const std::vector<Frequency>& gens_;
    unsigned long bound_;
    std::vector<std::vector<Rational>> suffix_lo_, suffix_hi_;
    std::vector<Integer> coeffs_;
};

}  // namespace detail

/// Exactly the set { sum n_j * g_j : 0 <= n_j <= coeff_bound }, deduplicated.
/// Always contains 0.
inline std::set<Frequency> sm_truncate(const std::vector<Frequency>& gens, const BasisPtr& basis,
                                       unsigned long coeff_bound) {
    std::set<Frequency> out;
    out.insert(Frequency::zero(basis));
    auto prepared = detail::prepare_generators(gens);
    for (const auto& g : prepared.gens) {
        std::set<Frequency> next;
        for (const auto& x : out) {
            Frequency acc = x;
            next.insert(acc);
            for (unsigned long n = 1; n <= coeff_bound; ++n) {
                acc = acc + g;
                next.insert(acc);
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Bounded exact search: is lambda = sum n_j g_j solvable with 0 <= n_j <= bound?
/// Non-membership is certified only relative to the bound.
inline MembershipResult sm_member(const Frequency& lambda, const std::vector<Frequency>& gens,
                                  unsigned long bound) {
    auto prepared = detail::prepare_generators(gens);
    std::vector<Integer> full(gens.size(), Integer(0));
    if (lambda.is_zero()) return MembershipResult::yes(full, bound);
    if (prepared.gens.empty()) return MembershipResult::not_within(bound);

    // sign obstruction: all generators strictly one side, target on the other
    int lo_sign = 2, hi_sign = -2;
    for (const auto& g : prepared.gens) {
        int s = g.sign();
        lo_sign = std::min(lo_sign, s);
        hi_sign = std::max(hi_sign, s);
    }
    int ts = lambda.sign();
    if (lo_sign > 0 && ts < 0) return MembershipResult::not_within(bound);
    if (hi_sign < 0 && ts > 0) return MembershipResult::not_within(bound);

    detail::MemberSearch search(prepared.gens, bound);
    auto witness = search.run(lambda);
    if (!witness) return MembershipResult::not_within(bound);
    for (size_t k = 0; k < prepared.gens.size(); ++k) full[prepared.original[k]] = (*witness)[k];
    return MembershipResult::yes(full, bound);
}

/// A semi-module is a module iff the negative of every generator is reachable.
inline ModuleCheckResult is_module(const std::vector<Frequency>& gens, const BasisPtr& /*basis*/,
                                   unsigned long bound = kDefaultSearchBound) {
    ModuleCheckResult out;
    out.bound = bound;
    auto prepared = detail::prepare_generators(gens);
    if (prepared.gens.empty()) {
        out.kind = ModuleKind::Module;  // {0} is a module
        return out;
    }
    int lo_sign = 2, hi_sign = -2;
    for (const auto& g : prepared.gens) {
        int s = g.sign();
        lo_sign = std::min(lo_sign, s);
        hi_sign = std::max(hi_sign, s);
    }
    if (lo_sign > 0 || hi_sign < 0) {
        out.kind = ModuleKind::SemiModuleOnly;
        out.certificate = std::string("all nonzero generators are strictly ") +
                          (lo_sign > 0 ? "positive" : "negative") +
                          "; no nonzero element has a negative in the semi-module";
        return out;
    }
    for (const auto& g : prepared.gens) {
        MembershipResult m = sm_member(-g, gens, bound);
        if (!m.member) {
            out.kind = ModuleKind::NotModuleWithin;
            return out;
        }
        out.witnesses.emplace_back(g, m.witness);
    }
    out.kind = ModuleKind::Module;
    return out;
}

namespace detail {

/// Searches for m*pos + n*neg with |value| < eps, n = nearest-integer match.
inline std::optional<std::pair<Frequency, std::pair<Integer, Integer>>> near_zero_pair_witness(
    const Frequency& neg, const Frequency& pos, unsigned long bound, const Rational& eps) {
    // ratio = pos / (-neg) > 0, irrational by caller's check
    RationalInterval rp = pos.enclosure(192);
    RationalInterval rn = (-neg).enclosure(192);
    Rational ratio_mid = rp.midpoint() / rn.midpoint();
    for (unsigned long m = 1; m <= bound; ++m) {
        Rational approx = ratio_mid * Rational(m);
        Integer n = rational_num(approx) / rational_den(approx);  // floor for positive
        for (Integer cand = n; cand <= n + 1; ++cand) {
            if (cand < 0 || cand > Integer(bound)) continue;
            Frequency w = pos.scaled(Rational(m)) + neg.scaled(Rational(cand));
            if (w.is_zero()) continue;
            RationalInterval e = w.enclosure(192);
            if (e.abs_upper() < eps) return std::make_pair(w, std::make_pair(Integer(m), cand));
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Classifies the closure of sm(gens) near zero.
///   Discrete:    all nonzero generators share one sign, or all lie on one
///                rational ray (then sm is contained in a scaled integer grid).
///   NonDiscrete: an opposite-sign pair with irrational ratio exists; the
///                witness is a nonzero element with |value| < eps.
///   Unknown:     no rule applied and bounded enumeration found no witness.
inline DiscretenessResult discreteness(const std::vector<Frequency>& gens, const BasisPtr& basis,
                                       unsigned long search_bound = kDefaultSearchBound,
                                       const Rational& eps = kDefaultDiscretenessEps) {
    if (eps <= 0) throw std::invalid_argument("discreteness: eps must be positive");
    DiscretenessResult out;
    out.bound = search_bound;
    out.eps = eps;
    auto prepared = detail::prepare_generators(gens);
    if (prepared.gens.empty()) {
        out.verdict = Discreteness::Discrete;
        out.reason = "semi-module is {0}";
        return out;
    }
    std::vector<int> signs;
    signs.reserve(prepared.gens.size());
    for (const auto& g : prepared.gens) signs.push_back(g.sign());
    bool has_pos = false, has_neg = false;
    for (int s : signs) (s > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        out.verdict = Discreteness::Discrete;
        out.reason = "all nonzero generators share one sign";
        return out;
    }
    // single rational ray?
    bool one_ray = true;
    for (size_t i = 1; i < prepared.gens.size() && one_ray; ++i) {
        if (!Frequency::rational_ratio(prepared.gens[i], prepared.gens[0])) one_ray = false;
    }
    if (one_ray) {
        out.verdict = Discreteness::Discrete;
        out.reason = "all generators are rational multiples of one frequency; sm lies in a scaled integer grid";
        return out;
    }
    // opposite-sign pair with irrational ratio
    for (size_t i = 0; i < prepared.gens.size(); ++i) {
        for (size_t j = 0; j < prepared.gens.size(); ++j) {
            if (signs[i] >= 0 || signs[j] <= 0) continue;
            if (Frequency::rational_ratio(prepared.gens[i], prepared.gens[j])) continue;
            auto hit = detail::near_zero_pair_witness(prepared.gens[i], prepared.gens[j], search_bound, eps);
            if (hit) {
                out.verdict = Discreteness::NonDiscrete;
                out.witness = hit->first;
                out.witness_coeffs.assign(gens.size(), Integer(0));
                out.witness_coeffs[prepared.original[j]] = hit->second.first;   // positive generator count
                out.witness_coeffs[prepared.original[i]] = hit->second.second;  // negative generator count
                out.reason = "opposite-sign generators with irrational ratio accumulate at zero";
                return out;
            }
        }
    }
    // Mixed signs, not one ray, yet no witness found within the bound: fall
    // back to a small exhaustive truncation scan before giving up.
    unsigned long enum_bound = 1;
    while (true) {
        double states = 1.0;
        for (size_t i = 0; i < prepared.gens.size(); ++i) states *= double(enum_bound + 2);
        if (states > 2e5) break;
        ++enum_bound;
    }
    for (const auto& w : sm_truncate(gens, basis, enum_bound)) {
        if (w.is_zero()) continue;
        if (w.enclosure(192).abs_upper() < eps) {
            out.verdict = Discreteness::NonDiscrete;
            out.witness = w;
            out.reason = "truncation enumeration found a nonzero element within eps of zero";
            return out;
        }
    }
    out.verdict = Discreteness::Unknown;
    out.reason = "no classification rule applied and bounded search found no witness";
    return out;
}

/// Finite generator presentation of a semi-module with cached truncations.
/// Immutable after construction; the cache is guarded for concurrent readers.
class SemiModule {
public:
    SemiModule(BasisPtr basis, std::vector<Frequency> generators)
        : basis_(std::move(basis)),
          generators_(std::move(generators)),
          cache_(std::make_shared<Cache>()) {
        for (const auto& g : generators_) require_same_basis(basis_, g.basis());
    }

    static SemiModule from_spectrum(const BasisPtr& basis, const std::set<Frequency>& spectrum) {
        return SemiModule(basis, std::vector<Frequency>(spectrum.begin(), spectrum.end()));
    }

    const BasisPtr& basis() const { return basis_; }
    const std::vector<Frequency>& generators() const { return generators_; }

    std::set<Frequency> truncate(unsigned long coeff_bound) const {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->truncations.find(coeff_bound);
        if (it != cache_->truncations.end()) return it->second;
        auto result = sm_truncate(generators_, basis_, coeff_bound);
        cache_->truncations[coeff_bound] = result;
        return result;
    }

    MembershipResult member(const Frequency& lambda, unsigned long bound = kDefaultSearchBound) const {
        return sm_member(lambda, generators_, bound);
    }

    ModuleCheckResult module_check(unsigned long bound = kDefaultSearchBound) const {
        return is_module(generators_, basis_, bound);
    }

    DiscretenessResult discreteness_check(unsigned long bound = kDefaultSearchBound,
                                          const Rational& eps = kDefaultDiscretenessEps) const {
        return discreteness(generators_, basis_, bound, eps);
    }

private:
    // The cache is shared between copies: a copy denotes the same semi-module.
    struct Cache {
        std::mutex mutex;
        std::map<unsigned long, std::set<Frequency>> truncations;
    };

    BasisPtr basis_;
    std::vector<Frequency> generators_;
    std::shared_ptr<Cache> cache_;
};

}  // namespace apstab
