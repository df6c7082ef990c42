#pragma once

// Governing equations: strong-form residual blocks, the momentum pull-back
// diagnostic, and the quasi-static Newton / backward-Euler solver.
//
// The solver works on the nodal virtual-work residual
//   R = ∂𝒜/∂x − f_ext − f_diss
// (energy_gradient, external_forces, dissipation_forces), i.e. the exact
// derivative of the discrete functional. Every boundary condition that the
// continuum problem states as a natural condition, including the double-force
// conditions, is therefore carried by R itself and needs no ghost layers.

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sgporo/variational.hpp"

namespace sgporo {

struct ResidualSystem {
    Field<Vec3> bulk_solid;
    Field<Vec3> bulk_fluid;
    std::vector<Face> faces;
    std::vector<std::vector<Vec3>> face_traction;      // solid traction condition, LHS − RHS
    std::vector<std::vector<Vec3>> face_chemical;      // fluid condition, LHS − RHS
    std::vector<std::vector<double>> face_double_solid;  // [F·(∂Ψ/∂∇ε·n)·n]·n
    std::vector<std::vector<double>> face_double_fluid;  // n·Φ^{-T}·(m_f ∂Ψ/∂∇m_f·n) n
    std::vector<Edge> edges;
    std::vector<std::vector<Vec3>> edge_solid;
    std::vector<std::vector<Vec3>> edge_fluid;

    double max_abs_bulk() const;
};

// Throws UnsupportedOperation on periodic grids.
ResidualSystem assemble_residuals(const PlacementState& p, const EnergyModel& model, const DissipationModel& diss,
                                  const Loads& loads, const RelativeVelocity& V);

struct PullbackCheck {
    Field<Vec3> eulerian;    // J_s [div(σ − div ℂ)]∘χ_s
    Field<Vec3> lagrangian;  // div_s{F_s·[∂Ψ/∂ε − div_s ∂Ψ/∂∇ε]}
    Field<Vec3> difference;  // eulerian − lagrangian
    // div_s(F_s·div_s R) with R = ∂Ψ/∂∇ε − C^{-1}⊗γ: the part of the
    // difference carried by an incompatible hyperstress.
    Field<Vec3> compatibility_term;
    Field<double> compatibility_residual;  // |R| per node
};

PullbackCheck momentum_pullback_check(const PlacementState& p, const EnergyModel& model);

struct SolverConfig {
    double newton_tol = 1e-9;  // relative to the residual scale of the step
    int max_iter = 50;
    double fd_jacobian_step = 1e-7;
    double dt = 1e-3;
    double t_end = 1.0;

    void validate() const;  // throws InvalidArgument
};

// Fixed degrees of freedom, one flag per (node, component).
struct Constraints {
    std::vector<char> chi_fixed;
    std::vector<char> phi_fixed;

    static Constraints none(const Grid& g);
    void fix_chi(std::size_t node, int comp) { chi_fixed[3 * node + static_cast<std::size_t>(comp)] = 1; }
    void fix_phi(std::size_t node, int comp) { phi_fixed[3 * node + static_cast<std::size_t>(comp)] = 1; }
    void fix_all_phi() { std::fill(phi_fixed.begin(), phi_fixed.end(), char{1}); }
};

struct PoroProblem {
    EnergyModel model;
    DissipationModel diss;
    Loads loads;
    Constraints constraints;
};

// Free unknowns in a fixed order: χ components first, then φ components.
class DofMap {
public:
    explicit DofMap(const Constraints& c);

    std::size_t size() const { return chi_.size() + phi_.size(); }
    std::vector<double> gather(const PlacementState& p) const;
    void scatter(const std::vector<double>& x, PlacementState& p) const;
    std::vector<double> restrict(const NodalForces& f) const;

private:
    std::vector<std::size_t> chi_;
    std::vector<std::size_t> phi_;
};

// V_f∘φ_f − V_s = −F_s·Φ_f^{-1}·(φ_f − φ_f^prev)/dt; zero for infinite dt.
RelativeVelocity relative_velocity(const KinematicDerived& k, const Field<Vec3>& phi, const Field<Vec3>& phi_prev,
                                   double dt);

// Nodal residual of one backward-Euler step (all nodes, constraints not applied).
NodalForces step_residual(const PoroProblem& problem, const PlacementState& p, const PlacementState& prev, double dt);

struct NewtonReport {
    double norm_before = 0.0;
    double norm_after = 0.0;
    int halvings = 0;
    double roundoff_floor = 0.0;  // ε·‖|J|·|x|‖
    bool stagnated = false;       // no decrease possible and ‖R‖ already below the floor
};

// One damped Newton iteration with a central-difference Jacobian. If the
// line search finds no decrease while ‖R‖ is at the round-off floor the state
// is left unchanged and `stagnated` is set; otherwise throws LineSearchFailure.
// Throws SolverFailure on a singular Jacobian.
NewtonReport newton_step(const PoroProblem& problem, PlacementState& p, const PlacementState& prev, double dt,
                         const SolverConfig& cfg);

struct SolveReport {
    int iterations = 0;
    double initial_norm = 0.0;
    double final_norm = 0.0;
    double tolerance = 0.0;  // absolute threshold used
    bool roundoff_limited = false;
    std::vector<double> history;
};

// Iterates newton_step until ‖R‖ ≤ newton_tol·max(‖R_0‖, ‖f_ext‖), or until a
// step stagnates at the round-off floor (roundoff_limited).
// Throws SolverFailure if max_iter is exhausted.
SolveReport solve_step(const PoroProblem& problem, PlacementState& p, const PlacementState& prev, double dt,
                       const SolverConfig& cfg);

struct StepRecord {
    int step = 0;
    double t = 0.0;
    Field<double> pressure;  // ρ_f⁰ ∂Ψ/∂m_f
    Field<double> m_f;
    double fluid_mass = 0.0;
    double energy = 0.0;            // 𝒜
    double total_potential = 0.0;   // 𝒜 + p^ext V_t − μ^ext ∫ m_f
    double dissipation_rate = 0.0;  // ∫ J_s [(D V)·V + (A·L):L]
    SolveReport solve;
};

StepRecord make_record(const PoroProblem& problem, const PlacementState& p, const PlacementState& prev, double dt,
                       double t, int step);

struct TimeState {
    double t = 0.0;
    PlacementState placement;
};

struct Trajectory {
    std::vector<StepRecord> records;
    TimeState final_state;
};

using StepObserver = std::function<void(const StepRecord&, const PlacementState&)>;

// Backward-Euler march from `initial` to cfg.t_end. On solver failure the
// last good state is written to `failure_checkpoint` (if non-empty) and the
// SolverFailure is rethrown with the path appended.
Trajectory advance_time(const PoroProblem& problem, const TimeState& initial, const SolverConfig& cfg,
                        const StepObserver& observer = {}, const std::string& failure_checkpoint = {});

// Versioned text snapshot of (t, χ_s, φ_f, m_f) with grid metadata.
inline constexpr int kCheckpointVersion = 1;
void write_checkpoint(const std::string& path, const TimeState& state, double rho_f0);
struct Checkpoint {
    TimeState state;
    double rho_f0 = 1.0;
    Field<double> m_f;
};
// Throws ConfigError on malformed or unsupported-version files.
Checkpoint read_checkpoint(const std::string& path);

// Writes to a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace sgporo
