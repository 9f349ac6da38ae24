#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "apstab/verdicts.hpp"
#include "apstab/version.hpp"

namespace apstab {

/// FNV-1a 64-bit digest, hex-encoded; stable across runs and platforms.
inline std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Analysis report: per-condition records with their evidence, the verdict,
/// and provenance (input digest + tool version). Serialization is key-sorted
/// and therefore byte-deterministic apart from the timing field.
struct Report {
    std::string command;
    std::string input_digest;
    std::string tool_version = APSTAB_VERSION;
    std::vector<ConditionRecord> conditions;
    std::string verdict;
    std::vector<std::string> csv_artifacts;
    nlohmann::json details = nlohmann::json::object();
    double timing_ms = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["input_digest"] = input_digest;
        j["tool_version"] = tool_version;
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : conditions) {
            nlohmann::json rec;
            rec["name"] = c.name;
            rec["anchor"] = c.anchor;
            rec["status"] = to_string(c.status);
            rec["evidence"] = c.evidence;
            if (!c.notes.empty()) rec["notes"] = c.notes;
            conds.push_back(rec);
        }
        j["conditions"] = conds;
        j["verdict"] = verdict;
        if (!csv_artifacts.empty()) j["csv_artifacts"] = csv_artifacts;
        if (!details.empty()) j["details"] = details;
        j["timing_ms"] = timing_ms;
        return j;
    }

    std::string to_text() const { return to_json().dump(2) + "\n"; }
};

}  // namespace apstab
