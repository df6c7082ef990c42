#pragma once

// Property and oracle checks over the whole library: algebraic identities,
// discrete calculus orders, variational oracles, thermodynamic consistency,
// conservation and the classical consolidation limit.
//
// Checks are grouped by acceptance criterion (1..10); supplementary checks
// (work equivalences between reference and current forms) use group 0.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgporo/consolidation.hpp"

namespace sgporo {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool passed = false;
    std::string metric;  // what `value` measures
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<", "<=" or ">="
    std::string details;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    // Random (state, variation) pairs for the variation and δε / δm_f oracles.
    int cases = 100;
    // Scenario for the consolidation-based checks. Gradient moduli and the
    // Brinkman viscosity are set to zero for the classical-limit run; only
    // the first load of the history is used.
    ScenarioConfig scenario;
    // Third-order transpose under test; replaceable to confirm that the
    // identity checks detect a broken implementation.
    std::function<Tensor3(const Tensor3&)> transpose3 = [](const Tensor3& t) { return sgporo::transpose3(t); };
    // Called after each check completes.
    std::function<void(const CheckResult&)> progress;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    bool criterion_passed(int criterion) const;
    std::vector<std::string> failures() const;
    std::string json() const;
};

inline constexpr int kCriterionCount = 10;

// Runs the listed criteria (all of 0..10 if empty) and returns every check.
VerifyReport verify_suite(const VerifyOptions& opts, const std::vector<int>& criteria = {});

// One-line description of each acceptance criterion, 1-based.
std::string criterion_title(int criterion);

}  // namespace sgporo
