#pragma once

// Figure-level acceptance checks. Each check records what it measured so that a
// failing criterion is reported with numbers rather than a bare verdict.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ionvac/output.hpp"
#include "ionvac/swap.hpp"

namespace ionvac {

struct CriterionOutcome {
    int id = 0;
    std::string title;
    bool passed = false;      // the substantive condition
    Json measured;
    double seconds = 0.0;
    double budget_seconds = 0.0;

    bool within_budget() const { return seconds <= budget_seconds; }
};

struct AcceptanceContext {
    std::uint64_t seed = 20050101;
    int threads = 0;
    int restarts = 32;
    /// Optimiser results already computed by the caller, reused by criterion 5.
    std::optional<OptimizationResult> three_pairs;
    std::optional<OptimizationResult> two_pairs;
};

constexpr int kCriterionCount = 12;

std::string criterion_title(int id);
double criterion_budget_seconds(int id);

/// Criteria 1..11. Criterion 12 compares whole repro-all runs and lives with the
/// acceptance suite and the CLI.
CriterionOutcome check_criterion(int id, AcceptanceContext& ctx);

/// One-line verdict with the measured values.
std::string describe(const CriterionOutcome& outcome);

}  // namespace ionvac
