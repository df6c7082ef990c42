// Command-line front end: consolidation runs, the verification suite and the
// classical series.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 solver failure,
// 4 verification failure, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgporo/consolidation.hpp"
#include "sgporo/verification.hpp"

namespace {

using namespace sgporo;

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kSolver = 3, kVerify = 4 };

struct Common {
    std::string output_dir = "sgporo_out";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

std::string joined(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

int run_command(const std::string& config_path, const Common& opt) {
    ScenarioConfig cfg = load_config(config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    std::filesystem::create_directories(opt.output_dir);
    const std::string ckpt = joined(opt.output_dir, cfg.checkpoint_file);

    ConsolidationHook progress;
    if (!opt.quiet) {
        const BiotConstants b = biot_constants(cfg);
        std::printf("column: %d nodes, H = %g m, c_v = %g m^2/s, p0/p_ext = %g\n", cfg.nodes, cfg.height,
                    b.consolidation_coefficient, b.undrained_ratio);
        std::fflush(stdout);
        progress = [&](const PoroProblem&, const OutputRecord& r, const PlacementState&, const PlacementState&,
                       const SolveReport& rep) {
            if (r.step % cfg.output_every != 0) return;
            std::printf("step %5d  t = %-10.4g T_v = %-8.4f U = %-8.5f settlement = %-12.5g newton %d\n", r.step,
                        r.t, r.T_v, r.U, r.settlement, rep.iterations);
            std::fflush(stdout);
        };
    }
    ConsolidationResult res;
    try {
        res = run_consolidation(cfg, progress, ckpt);
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        std::fprintf(stderr, "checkpoint: %s\n", ckpt.c_str());
        return kSolver;
    }
    const auto paths = write_outputs(res, cfg, opt.output_dir);
    if (!opt.quiet) {
        const OutputRecord& last = res.records.back();
        std::printf("finished at t = %g s, U = %.5f (undrained settlement %.6g m, drained %.6g m)\n", last.t, last.U,
                    res.settlement_undrained, res.settlement_drained);
        for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    }
    return kOk;
}

int verify_command(const std::string& config_path, const Common& opt, const std::vector<int>& criteria) {
    const ScenarioConfig cfg = load_config(config_path);
    VerifyOptions vo;
    vo.seed = opt.seed.value_or(cfg.seed);
    vo.cases = cfg.verify_cases;
    vo.scenario = cfg;
    if (!opt.quiet)
        vo.progress = [](const CheckResult& c) {
            std::printf("[%2d] %s  %s: %s = %.3g (%s %.3g), %.1f s\n", c.criterion, c.passed ? "PASS" : "FAIL",
                        c.name.c_str(), c.metric.c_str(), c.value, c.comparison.c_str(), c.threshold, c.seconds);
            std::fflush(stdout);
        };
    const VerifyReport rep = verify_suite(vo, criteria);
    std::filesystem::create_directories(opt.output_dir);
    const std::string path = joined(opt.output_dir, "verification_report.json");
    atomic_write(path, rep.json());
    const auto failed = rep.failures();
    if (!opt.quiet) std::printf("%zu checks, %zu failed; report %s\n", rep.checks.size(), failed.size(), path.c_str());
    for (const auto& f : failed) std::fprintf(stderr, "failed: %s\n", f.c_str());
    return failed.empty() ? kOk : kVerify;
}

int terzaghi_command(double tv, int terms, double z, bool quiet) {
    const TerzaghiValue v = terzaghi_reference(tv, z, terms);
    if (quiet)
        std::printf("%.15g %.15g\n", v.U, v.p_ratio);
    else
        std::printf("T_v = %g, z/H = %g, %d terms\nU = %.15g (remainder <= %.3g)\np/p0 = %.15g (remainder <= %.3g)\n",
                    tv, z, terms, v.U, v.U_remainder_bound, v.p_ratio, v.p_remainder_bound);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Second-gradient poroelastic consolidation and verification"};
    app.require_subcommand(1);
    Common opt;
    app.add_option("--output-dir", opt.output_dir, "Directory for results")->capture_default_str();
    app.add_option("--seed", opt.seed, "Override the configuration's random seed");
    app.add_flag("--quiet", opt.quiet, "Print nothing but errors");

    std::string config;
    auto* run = app.add_subcommand("run", "Run the consolidation scenario of a configuration");
    run->add_option("config", config, "Configuration file")->required();
    run->fallthrough();

    std::vector<int> criteria;
    auto* verify = app.add_subcommand("verify", "Run the verification suite");
    verify->add_option("config", config, "Configuration file")->required();
    verify->add_option("--criteria", criteria, "Restrict to these criterion groups (0-10)")->check(CLI::Range(0, 10));
    verify->fallthrough();

    double tv = 0.0, z = 0.5;
    int terms = 200;
    auto* terz = app.add_subcommand("terzaghi", "Evaluate the classical consolidation series");
    terz->add_option("--tv", tv, "Time factor T_v")->required();
    terz->add_option("--terms", terms, "Number of series terms")->capture_default_str();
    terz->add_option("--z", z, "Depth below the drained surface over drainage length")->capture_default_str();
    terz->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return run_command(config, opt);
        if (*verify) return verify_command(config, opt, criteria);
        return terzaghi_command(tv, terms, z, opt.quiet);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kConfig;
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kOther;
    }
}
