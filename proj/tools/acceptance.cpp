// Acceptance report: one PASS/FAIL line per criterion, default scenario.
// Exit code 0 only if every selected criterion passes.

#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "sgporo/verification.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria report"};
    std::uint64_t seed = 1;
    std::vector<int> only;
    bool verbose = false;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--only", only, "Criteria to run (default 1-10)")->check(CLI::Range(1, sgporo::kCriterionCount));
    app.add_flag("--verbose", verbose, "Print every check under its criterion");
    CLI11_PARSE(app, argc, argv);

    if (only.empty())
        for (int c = 1; c <= sgporo::kCriterionCount; ++c) only.push_back(c);

    sgporo::VerifyOptions o;
    o.seed = seed;
    bool all = true;
    for (int c : only) {
        const sgporo::VerifyReport r = sgporo::verify_suite(o, {c});
        const bool ok = r.criterion_passed(c);
        all = all && ok;
        double seconds = 0.0;
        for (const auto& k : r.checks) seconds += k.seconds;
        std::printf("criterion %2d %s  %s (%zu checks, %.1f s)\n", c, ok ? "PASS" : "FAIL",
                    sgporo::criterion_title(c).c_str(), r.checks.size(), seconds);
        for (const auto& k : r.checks)
            if (verbose || !k.passed)
                std::printf("    %s %s: %s = %.3g (%s %.3g)\n      %s\n", k.passed ? "ok  " : "FAIL", k.name.c_str(),
                            k.metric.c_str(), k.value, k.comparison.c_str(), k.threshold, k.details.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
