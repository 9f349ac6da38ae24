#pragma once

#include <map>
#include <string>
#include <vector>

#include "apstab/numeric.hpp"

namespace apstab {

enum class CheckStatus { Pass, Fail, NotApplicable, Info };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotApplicable: return "not_applicable";
        case CheckStatus::Info: return "info";
    }
    return "?";
}

/// One verified condition with its evidence numbers. The anchor states the
/// mathematical condition being checked, so reports are auditable on their own.
struct ConditionRecord {
    std::string name;
    std::string anchor;
    CheckStatus status = CheckStatus::Info;
    std::map<std::string, double> evidence;
    std::string notes;
};

enum class StabilityClass { StronglyStable, BoundedAlmostPeriodic, Unbounded, Inconclusive };

inline const char* to_string(StabilityClass v) {
    switch (v) {
        case StabilityClass::StronglyStable: return "strongly_stable";
        case StabilityClass::BoundedAlmostPeriodic: return "bounded_almost_periodic";
        case StabilityClass::Unbounded: return "unbounded";
        case StabilityClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Finite surrogate for "the sequence tends to zero": monotone within a noise
/// factor, the final value at most ratio * first (or below the absolute
/// floor), and the probe sequence must actually reach small parameters.
struct TrendRule {
    double noise_factor = 1.05;
    double final_ratio = 0.1;
    double absolute_floor = 1e-12;
    Rational min_final_alpha = Rational(1, 100);

    bool pass(const std::vector<double>& values, const Rational& final_alpha) const {
        if (values.empty()) return false;
        if (final_alpha > min_final_alpha) return false;
        for (size_t i = 1; i < values.size(); ++i) {
            if (values[i] > values[i - 1] * noise_factor + absolute_floor) return false;
        }
        return values.back() <= final_ratio * values.front() + absolute_floor;
    }
};

}  // namespace apstab
