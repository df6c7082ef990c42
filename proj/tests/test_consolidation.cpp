#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sgporo/consolidation.hpp"

using namespace sgporo;

namespace {

// Method-of-images form of the drained-top / sealed-bottom diffusion problem;
// converges fast for small T, independent of the Fourier series.
double pressure_images(double T, double s) {
    double sum = 0.0;
    for (int n = 0; n < 60; ++n) {
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        sum += sign * (std::erfc((2.0 * n + s) / (2.0 * std::sqrt(T))) +
                       std::erfc((2.0 * n + 2.0 - s) / (2.0 * std::sqrt(T))));
    }
    return 1.0 - sum;
}

double degree_images(double T) {
    const double rt = std::sqrt(T);
    auto ierfc = [](double x) { return std::exp(-x * x) / std::sqrt(std::numbers::pi) - x * std::erfc(x); };
    double sum = 0.0;
    for (int n = 1; n < 60; ++n) sum += (n % 2 == 0 ? 1.0 : -1.0) * ierfc(n / rt);
    return 2.0 * rt / std::sqrt(std::numbers::pi) + 4.0 * rt * sum;
}

ScenarioConfig small_column(int nodes = 16, double t_end = 0.1) {
    ScenarioConfig c;
    c.nodes = nodes;
    c.solver.dt = 0.01;
    c.solver.t_end = t_end;
    return c;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("sgporo_cons_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const ScenarioConfig c = parse_config("# nothing\n\n");
    EXPECT_EQ(c.nodes, 64);
    EXPECT_EQ(c.solver.dt, 5e-3);
    ASSERT_EQ(c.load_history.size(), 1u);
    EXPECT_EQ(c.load_history[0].p_ext, 1e-3);
}

TEST(ParseConfig, ReadsEveryKey) {
    const ScenarioConfig c = parse_config(
        "nodes = 24\ncolumn_height_m = 2.5\nlambda_pa = 2\nshear_modulus_pa = 3\nbiot_modulus_pa = 4\n"
        "biot_coefficient = 0.5\nkappa_s_pa_m2 = 0.01\nkappa_f_pa_m2 = 0.02\nfluid_density_kg_m3 = 1000\n"
        "darcy_resistivity_pa_s_m2 = 7\nbrinkman_viscosity_pa_s = 0.1\nload_history_s_pa = 0:1e-3, 0.5:2e-3\n"
        "drained_chemical_potential_j_kg = 0.25\ntime_step_s = 0.1\nend_time_s = 2\nnewton_tolerance = 1e-8\n"
        "newton_max_iterations = 12\njacobian_step = 1e-6\noutput_every_steps = 3\nprofile_times_s = 0.1, 1\n"
        "seed = 42\nverify_cases = 7\ncsv_file = a.csv\nprofile_svg_file = b.svg\ncurve_svg_file = c.svg\n"
        "checkpoint_file = d.ckpt   # trailing comment\n");
    EXPECT_EQ(c.nodes, 24);
    EXPECT_EQ(c.height, 2.5);
    EXPECT_EQ(c.model.lambda, 2.0);
    EXPECT_EQ(c.model.G, 3.0);
    EXPECT_EQ(c.model.M_b, 4.0);
    EXPECT_EQ(c.model.b, 0.5);
    EXPECT_EQ(c.model.kappa_s, 0.01);
    EXPECT_EQ(c.model.kappa_f, 0.02);
    EXPECT_EQ(c.model.rho_f0, 1000.0);
    EXPECT_EQ(c.darcy_resistivity, 7.0);
    EXPECT_EQ(c.brinkman_viscosity, 0.1);
    ASSERT_EQ(c.load_history.size(), 2u);
    EXPECT_EQ(c.load_history[1].t_start, 0.5);
    EXPECT_EQ(c.load_history[1].p_ext, 2e-3);
    EXPECT_EQ(c.mu_ext, 0.25);
    EXPECT_EQ(c.solver.dt, 0.1);
    EXPECT_EQ(c.solver.t_end, 2.0);
    EXPECT_EQ(c.solver.newton_tol, 1e-8);
    EXPECT_EQ(c.solver.max_iter, 12);
    EXPECT_EQ(c.solver.fd_jacobian_step, 1e-6);
    EXPECT_EQ(c.output_every, 3);
    EXPECT_EQ(c.profile_times, (std::vector<double>{0.1, 1.0}));
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.verify_cases, 7);
    EXPECT_EQ(c.csv_file, "a.csv");
    EXPECT_EQ(c.profile_svg_file, "b.svg");
    EXPECT_EQ(c.curve_svg_file, "c.svg");
    EXPECT_EQ(c.checkpoint_file, "d.ckpt");
}

TEST(ParseConfig, FormatRoundTrips) {
    ScenarioConfig c = small_column();
    c.load_history = {{0.0, 1e-3}, {0.05, -3e-4}};
    c.profile_times = {0.01, 0.07};
    c.model.kappa_f = 1.0 / 3.0;
    const std::string text = format_config(c);
    EXPECT_EQ(format_config(parse_config(text)), text);
}

TEST(ParseConfig, ErrorsNameTheLine) {
    EXPECT_NE(config_error("nodes = 8\nporosity = 0.3\n").find("line 2"), std::string::npos);
    EXPECT_NE(config_error("nodes = 8\nporosity = 0.3\n").find("unknown key"), std::string::npos);
    EXPECT_NE(config_error("nodes = 8\n\nnodes = 10\n").find("line 3"), std::string::npos);
    EXPECT_NE(config_error("lambda_pa = 1.0x\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error("just some words\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error("load_history_s_pa = 0:1, 2\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error("csv_file = ../escape.csv\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error("time_step_s = nan\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error("seed = -1\n").find("line 1"), std::string::npos);
}

TEST(ParseConfig, RejectsInvalidParameters) {
    EXPECT_FALSE(config_error("nodes = 9\n").empty());
    EXPECT_FALSE(config_error("nodes = 2\n").empty());
    EXPECT_FALSE(config_error("shear_modulus_pa = -1\n").empty());
    EXPECT_FALSE(config_error("darcy_resistivity_pa_s_m2 = 0\n").empty());
    EXPECT_FALSE(config_error("column_height_m = 0\n").empty());
    EXPECT_FALSE(config_error("time_step_s = 0\n").empty());
    EXPECT_FALSE(config_error("load_history_s_pa = 0.1:1e-3\n").empty());
    EXPECT_FALSE(config_error("load_history_s_pa = 0:1e-3, 0.0123:2e-3\n").empty());
    EXPECT_FALSE(config_error("load_history_s_pa = 0:1e-3, 0.1:2e-3, 0.1:3e-3\n").empty());
    EXPECT_FALSE(config_error("output_every_steps = 0\n").empty());
    EXPECT_FALSE(config_error("newton_max_iterations = 0\n").empty());
}

TEST(ParseConfig, MissingFileIsConfigError) {
    EXPECT_THROW(load_config("/nonexistent/dir/none.cfg"), ConfigError);
}

TEST(ParseConfig, LoadFileErrorsCarryThePath) {
    const auto dir = temp_dir("cfg");
    const std::string path = (dir / "bad.cfg").string();
    std::ofstream(path) << "nodes = 8\nbogus = 1\n";
    try {
        load_config(path);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(LoadHistory, PiecewiseConstant) {
    ScenarioConfig c;
    c.load_history = {{0.0, 1.0}, {0.5, 2.0}, {1.0, -1.0}};
    EXPECT_EQ(c.load_at(0.0), 1.0);
    EXPECT_EQ(c.load_at(0.49), 1.0);
    EXPECT_EQ(c.load_at(0.5), 2.0);
    EXPECT_EQ(c.load_at(0.5 - 1e-15), 2.0);
    EXPECT_EQ(c.load_at(3.0), -1.0);
}

TEST(TerzaghiReference, MatchesImageSolution) {
    for (double T : {0.01, 0.05, 0.2, 0.5}) {
        for (double s : {0.0, 0.1, 0.5, 0.9, 1.0}) {
            const TerzaghiValue v = terzaghi_reference(T, s, 400);
            EXPECT_NEAR(v.p_ratio, pressure_images(T, s), 1e-12) << "T=" << T << " s=" << s;
        }
        EXPECT_NEAR(terzaghi_reference(T, 0.0, 400).U, degree_images(T), 1e-12) << T;
    }
}

TEST(TerzaghiReference, HalfConsolidationTime) {
    EXPECT_NEAR(terzaghi_reference(0.197, 0.0, 100).U, 0.5, 1e-3);
    EXPECT_NEAR(terzaghi_reference(0.848, 0.0, 100).U, 0.9, 1e-3);
}

TEST(TerzaghiReference, RemainderBoundsHold) {
    for (double T : {0.002, 0.02, 0.2, 1.0}) {
        const TerzaghiValue exact = terzaghi_reference(T, 0.5, 4000);
        for (int K : {1, 2, 5, 20}) {
            const TerzaghiValue v = terzaghi_reference(T, 0.5, K);
            EXPECT_LE(std::abs(v.U - exact.U), v.U_remainder_bound * (1 + 1e-12) + 1e-15) << T << " " << K;
            EXPECT_LE(std::abs(v.p_ratio - exact.p_ratio), v.p_remainder_bound * (1 + 1e-12) + 1e-15)
                << T << " " << K;
        }
    }
}

TEST(TerzaghiReference, InitialAndBoundaryValues) {
    const TerzaghiValue start = terzaghi_reference(0.0, 0.3, 5);
    EXPECT_EQ(start.p_ratio, 1.0);
    EXPECT_EQ(start.U, 0.0);
    EXPECT_EQ(terzaghi_reference(0.0, 0.0, 5).p_ratio, 0.0);
    EXPECT_EQ(terzaghi_reference(0.3, 0.0, 5).p_ratio, 0.0);
    EXPECT_LT(terzaghi_reference(5.0, 1.0, 50).p_ratio, 1e-5);
}

TEST(TerzaghiReference, RejectsBadArguments) {
    EXPECT_THROW(terzaghi_reference(-0.1, 0.5, 10), InvalidArgument);
    EXPECT_THROW(terzaghi_reference(0.1, 0.5, 0), InvalidArgument);
    EXPECT_THROW(terzaghi_reference(0.1, 1.5, 10), InvalidArgument);
    EXPECT_THROW(terzaghi_reference(std::nan(""), 0.5, 10), InvalidArgument);
}

TEST(BiotConstants, DefaultsMatchHandComputation) {
    // λ + 2G = 3, undrained modulus 4, M = 1, b = 1, d = 1.
    const BiotConstants k = biot_constants(ScenarioConfig{});
    EXPECT_DOUBLE_EQ(k.constrained_modulus, 3.0);
    EXPECT_DOUBLE_EQ(k.undrained_ratio, 0.25);
    EXPECT_DOUBLE_EQ(k.consolidation_coefficient, 0.75);
}

TEST(RunConsolidation, ZeroLoadStaysAtRest) {
    ScenarioConfig c = small_column(8, 0.03);
    c.load_history = {{0.0, 0.0}};
    const ConsolidationResult r = run_consolidation(c);
    ASSERT_EQ(r.records.size(), 4u);
    for (const OutputRecord& o : r.records) {
        EXPECT_EQ(o.U, 0.0);
        EXPECT_NEAR(o.settlement, 0.0, 1e-15);
        EXPECT_NEAR(o.energy, 0.0, 1e-25);
        for (double p : o.profile.p) EXPECT_NEAR(p, 0.0, 1e-14);
    }
}

TEST(RunConsolidation, UndrainedStartAndDrainedLimit) {
    const ScenarioConfig c = small_column(16, 0.02);
    const ConsolidationResult r = run_consolidation(c);
    const double p_ext = c.load_history[0].p_ext;
    // Linear estimates: s0 = −p H / (λ+2G+b²M), s∞ = −p H / (λ+2G).
    EXPECT_NEAR(r.settlement_undrained, -p_ext / 4.0, 1e-3 * p_ext);
    EXPECT_NEAR(r.settlement_drained, -p_ext / 3.0, 1e-3 * p_ext);
    const ProfileSnapshot& p0 = r.records[0].profile;
    for (double p : p0.p) EXPECT_NEAR(p / p_ext, 0.25, 1e-3);
    for (double m : p0.m_f) EXPECT_NEAR(m, c.model.rho_f0, 1e-12);
}

TEST(RunConsolidation, FollowsClassicalSeries) {
    const ScenarioConfig c = small_column(32, 0.2);
    const ConsolidationResult r = run_consolidation(c);
    for (const OutputRecord& o : r.records) {
        if (o.step < 5) continue;
        EXPECT_NEAR(o.U, terzaghi_reference(o.T_v, 0.0, 200).U, 0.02) << o.t;
    }
}

TEST(RunConsolidation, DegreeOfConsolidationIncreases) {
    const ConsolidationResult r = run_consolidation(small_column(16, 0.3));
    for (std::size_t i = 1; i < r.records.size(); ++i) {
        EXPECT_GT(r.records[i].U, r.records[i - 1].U) << i;
        EXPECT_GE(r.records[i].dissipation, 0.0);
    }
    ASSERT_TRUE(r.final_state.has_value());
    EXPECT_NEAR(r.final_state->t, 0.3, 1e-12);
}

TEST(RunConsolidation, LoadStepIncreasesSettlement) {
    ScenarioConfig c = small_column(16, 0.1);
    c.load_history = {{0.0, 1e-3}, {0.05, 2e-3}};
    const ConsolidationResult r = run_consolidation(c);
    EXPECT_NEAR(r.settlement_drained, -2e-3 / 3.0, 2e-6);
    EXPECT_EQ(r.records[4].p_ext, 1e-3);
    EXPECT_EQ(r.records[5].p_ext, 2e-3);
    EXPECT_LT(r.records[5].settlement, r.records[4].settlement - 1e-4);
}

TEST(RunConsolidation, HookSeesEveryStep) {
    int calls = 0;
    run_consolidation(small_column(8, 0.05), [&](const PoroProblem&, const OutputRecord& o, const PlacementState&,
                                                  const PlacementState&, const SolveReport& rep) {
        ++calls;
        EXPECT_EQ(o.step, calls);
        EXPECT_TRUE(rep.final_norm <= rep.tolerance || rep.roundoff_limited);
    });
    EXPECT_EQ(calls, 5);
}

TEST(RunConsolidation, FailureWritesCheckpoint) {
    ScenarioConfig c = small_column(8, 0.05);
    c.solver.max_iter = 1;
    const auto dir = temp_dir("failure");
    const std::string ckpt = (dir / "last.ckpt").string();
    try {
        run_consolidation(c, {}, ckpt);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_NE(std::string(e.what()).find(ckpt), std::string::npos);
    }
    const Checkpoint cp = read_checkpoint(ckpt);
    EXPECT_EQ(cp.state.t, 0.0);
    EXPECT_EQ(cp.state.placement.grid().node_count(), 8u);
}

TEST(Outputs, CsvIsDeterministicAndComplete) {
    ScenarioConfig c = small_column(8, 0.05);
    const std::string a = consolidation_csv(run_consolidation(c), 2);
    const std::string b = consolidation_csv(run_consolidation(c), 2);
    EXPECT_EQ(a, b);
    std::istringstream is(a);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,node,z,p,tr_eps,m_f,U,energy,dissipation");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        EXPECT_EQ(line.find("-0,"), std::string::npos);
    }
    // Steps 0, 2, 4 plus the final step 5, 8 nodes each.
    EXPECT_EQ(rows, 4 * 8);
}

TEST(Outputs, WritesAllFilesAtomically) {
    ScenarioConfig c = small_column(8, 0.05);
    const ConsolidationResult r = run_consolidation(c);
    const auto dir = temp_dir("outputs") / "nested";
    const auto paths = write_outputs(r, c, dir.string());
    ASSERT_EQ(paths.size(), 3u);
    for (const auto& p : paths) {
        EXPECT_TRUE(std::filesystem::exists(p)) << p;
        EXPECT_GT(std::filesystem::file_size(p), 100u);
    }
    for (const auto& e : std::filesystem::directory_iterator(dir))
        EXPECT_NE(e.path().extension(), ".tmp") << e.path();
    std::ifstream svg(paths[2]);
    std::stringstream ss;
    ss << svg.rdbuf();
    EXPECT_EQ(ss.str().rfind("<svg", 0), 0u);
    EXPECT_NE(ss.str().find("</svg>"), std::string::npos);
    EXPECT_NE(ss.str().find("polyline"), std::string::npos);
}
