#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bbm {

enum class VerifyLevel { fast, full };

/// Parses "fast" or "full"; throws DomainError otherwise.
VerifyLevel parse_verify_level(const std::string& text);
const char* to_string(VerifyLevel level);

enum class CriterionStatus { pass, fail, skipped };
const char* to_string(CriterionStatus status);

struct CriterionResult {
    std::string id;     // "A1" ... "A12"
    std::string title;
    bool monte_carlo = false;
    CriterionStatus status = CriterionStatus::skipped;
    std::vector<std::pair<std::string, double>> measured;
    std::string detail;  // failure reason or note
    double seconds = 0.0;
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::fast;
    std::vector<CriterionResult> criteria;

    /// True iff no criterion failed.
    bool passed() const;
};

/// Seed used for the Monte Carlo criteria when none is given.
inline constexpr std::uint64_t kAcceptanceSeed = 20240611;

/// Runs A1-A7 and, at the full level, the Monte Carlo criteria A8-A12.
/// Skipped criteria are listed with status skipped. progress, when non-null,
/// receives each result as soon as it is known.
VerifyReport run_acceptance(VerifyLevel level, std::uint64_t seed = kAcceptanceSeed,
                            void (*progress)(const CriterionResult&) = nullptr);

/// "A1 PASS  p=1 closed-form paths  key=value ... (0.12 s)".
std::string format_line(const CriterionResult& result);

std::string report_to_json(const VerifyReport& report);

}  // namespace bbm
