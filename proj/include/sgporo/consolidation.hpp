#pragma once

// One-dimensional consolidation of a column: configuration, the classical
// series solution, the simulation driver and its CSV / SVG output.
//
// Geometry: N nodes along axis 0, X ∈ [0, H]. The bottom (X = 0) is fixed and
// impermeable (χ_s and φ_f pinned); the top (X = H) carries the external
// pressure and is drained at the chemical potential μ^ext. Lateral motion is
// suppressed. Units are SI throughout.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgporo/governing.hpp"

namespace sgporo {

// Piecewise-constant load: value applies from t_start until the next entry.
struct LoadStep {
    double t_start = 0.0;
    double p_ext = 0.0;
};

struct ScenarioConfig {
    int nodes = 64;
    double height = 1.0;
    EnergyModel model{1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0};
    double darcy_resistivity = 1.0;    // D = d·I
    double brinkman_viscosity = 0.0;   // A = a·I
    std::vector<LoadStep> load_history{{0.0, 1e-3}};
    double mu_ext = 0.0;
    SolverConfig solver{1e-9, 50, 1e-7, 5e-3, 4.0 / 3.0};
    int output_every = 1;
    std::vector<double> profile_times;  // empty: a default set
    std::uint64_t seed = 1;
    int verify_cases = 100;
    std::string csv_file = "consolidation.csv";
    std::string profile_svg_file = "pressure_profiles.svg";
    std::string curve_svg_file = "consolidation_curve.svg";
    std::string checkpoint_file = "failure.ckpt";

    double load_at(double t) const;
    // Throws ConfigError.
    void validate() const;
};

// key = value lines, '#' comments. Unknown or repeated keys, malformed
// values and invalid parameters throw ConfigError naming the line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ScenarioConfig& c);

struct TerzaghiValue {
    double p_ratio = 0.0;          // p / p₀
    double U = 0.0;                // degree of consolidation
    double p_remainder_bound = 0;  // |truncation error| bounds
    double U_remainder_bound = 0;
};

// z_over_H is the distance from the drained surface over the drainage length.
// T_v = 0 returns the initial condition exactly.
// Throws InvalidArgument for T_v < 0, terms < 1 or z_over_H outside [0, 1].
TerzaghiValue terzaghi_reference(double T_v, double z_over_H, int terms);

// Classical Biot constants of the first-gradient limit.
struct BiotConstants {
    double constrained_modulus = 0.0;  // λ + 2G
    double undrained_ratio = 0.0;      // p₀ / p^ext = b M / (λ + 2G + b² M)
    double consolidation_coefficient = 0.0;  // c_v = M (λ+2G) / ((λ+2G+b²M) d)
};
BiotConstants biot_constants(const ScenarioConfig& c);

PoroProblem column_problem(const ScenarioConfig& c, double p_ext);

struct ProfileSnapshot {
    double t = 0.0;
    std::vector<double> z, p, tr_eps, m_f;
};

struct OutputRecord {
    int step = 0;
    double t = 0.0;
    double T_v = 0.0;
    double p_ext = 0.0;
    double settlement = 0.0;  // top displacement
    double U = 0.0;
    double energy = 0.0;
    double total_potential = 0.0;
    double dissipation = 0.0;  // rate
    double fluid_mass = 0.0;
    int newton_iterations = 0;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    bool roundoff_limited = false;
    ProfileSnapshot profile;
};

struct ConsolidationResult {
    BiotConstants biot;
    double settlement_undrained = 0.0;
    double settlement_drained = 0.0;
    std::vector<OutputRecord> records;
    std::optional<TimeState> final_state;  // set once the run completes
};

// Called after every accepted step with the state, the previous state and
// the step's solve report.
using ConsolidationHook = std::function<void(const PoroProblem&, const OutputRecord&, const PlacementState&,
                                             const PlacementState&, const SolveReport&)>;

// Undrained start (φ_f frozen) under the first load, drained limit under the
// last, then backward-Euler marching. Load changes must fall on the time
// grid. On solver failure the last good state is written to
// `failure_checkpoint` (if non-empty) and SolverFailure propagates.
ConsolidationResult run_consolidation(const ScenarioConfig& c, const ConsolidationHook& hook = {},
                                      const std::string& failure_checkpoint = {});

// Header: t,node,z,p,tr_eps,m_f,U,energy,dissipation; one row per node per
// output step.
std::string consolidation_csv(const ConsolidationResult& r, int every = 1);
std::string pressure_profile_svg(const ConsolidationResult& r, const std::vector<double>& times, double height);
std::string consolidation_curve_svg(const ConsolidationResult& r);

// Writes CSV and both SVGs into `dir` (created if missing); returns the paths.
std::vector<std::string> write_outputs(const ConsolidationResult& r, const ScenarioConfig& c, const std::string& dir);

}  // namespace sgporo
