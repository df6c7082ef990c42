#include "sgporo/governing.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sgporo/diff_ops.hpp"

namespace sgporo {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double ResidualSystem::max_abs_bulk() const { return std::max(max_abs(bulk_solid), max_abs(bulk_fluid)); }

ResidualSystem assemble_residuals(const PlacementState& p, const EnergyModel& model, const DissipationModel& diss,
                                  const Loads& loads, const RelativeVelocity& V) {
    const Grid& g = p.grid();
    const EulerLagrange el = euler_lagrange(p, model);
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, model.rho_f0);
    const Field<Tensor2> gV = grad(V);
    const Field<Tensor2> B = make_field(g, [&](std::size_t n) {
        return k.J_s[n] * dot(dot(diss.A_brink(), gV[n]), k.C_inv[n]);
    });
    const Field<Vec3> divB = div(B);
    // Φ^{-T}·F^T·a
    auto to_fluid = [&](std::size_t n, const Vec3& a) {
        return dot(transpose(k.Phi_inv[n]), dot(transpose(k.F_s[n]), a));
    };

    ResidualSystem r{el.bulk_solid, Field<Vec3>(g), {}, {}, {}, {}, {}, {}, {}, {}};
    for (std::size_t n = 0; n < g.node_count(); ++n)
        r.bulk_fluid[n] = el.bulk_fluid[n] - to_fluid(n, k.J_s[n] * dot(diss.D(), V[n])) + to_fluid(n, divB[n]);

    const auto loaded = loads.active_faces(g);
    for (const FaceDensities& fd : el.faces) {
        const bool is_loaded = std::find(loaded.begin(), loaded.end(), fd.face) != loaded.end();
        const Vec3 nrm = fd.face.normal();
        const auto nodes = g.face_nodes(fd.face);
        std::vector<Vec3> trac, chem;
        std::vector<double> ds, df;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t n = nodes[i];
            Vec3 t = fd.solid_traction[i];
            Vec3 c = fd.fluid_traction[i] - to_fluid(n, dot(B[n], nrm));
            if (is_loaded) {
                t += (loads.p_ext * k.J_s[n]) * dot(nrm, k.F_inv[n]);
                c -= (loads.mu_ext * m[n]) * dot(nrm, k.Phi_inv[n]);
            }
            trac.push_back(t);
            chem.push_back(c);
            ds.push_back(dot(fd.solid_double[i], nrm));
            df.push_back(dot(fd.fluid_double[i], nrm));
        }
        r.faces.push_back(fd.face);
        r.face_traction.push_back(std::move(trac));
        r.face_chemical.push_back(std::move(chem));
        r.face_double_solid.push_back(std::move(ds));
        r.face_double_fluid.push_back(std::move(df));
    }
    for (const EdgeDensities& ed : el.edges) {
        r.edges.push_back(ed.edge);
        r.edge_solid.push_back(ed.solid);
        r.edge_fluid.push_back(ed.fluid);
    }
    return r;
}

PullbackCheck momentum_pullback_check(const PlacementState& p, const EnergyModel& model) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, model.rho_f0);
    const EnergyDerivatives d = energy_partials(k, m, grad(m), model);
    const StressState st = recover_stresses(k, d, m);

    // div_x σ = ∂σ_ij/∂X_K F^{-1}_Kj; ∇_x f = F^{-T}·∇_s f.
    const Field<Tensor3> gsig = grad(st.sigma);
    const Field<Tensor2> gc = grad(st.hyper_c);
    const Field<double> div_c = make_field(g, [&](std::size_t n) { return trace(dot(gc[n], k.F_inv[n])); });
    const Field<Vec3> g_div_c = grad(div_c);
    const Field<Vec3> eulerian = make_field(g, [&](std::size_t n) {
        return k.J_s[n] * (ddot(gsig[n], transpose(k.F_inv[n])) - dot(g_div_c[n], k.F_inv[n]));
    });

    const Field<Tensor2> div_G = div(d.dPsi_dgrad_eps);
    const Field<Vec3> lagrangian =
        div(make_field(g, [&](std::size_t n) { return dot(k.F_s[n], d.dPsi_deps[n] - div_G[n]); }));

    const Field<Tensor3> R = make_field(g, [&](std::size_t n) { return d.dPsi_dgrad_eps[n] - outer(k.C_inv[n], st.gamma[n]); });
    const Field<Tensor2> div_R = div(R);
    const Field<Vec3> compat = div(make_field(g, [&](std::size_t n) { return dot(k.F_s[n], div_R[n]); }));
    return {eulerian, lagrangian, eulerian - lagrangian, compat, st.compatibility_residual};
}

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0)) throw InvalidArgument("SolverConfig: newton_tol must be positive");
    if (max_iter < 1) throw InvalidArgument("SolverConfig: max_iter must be at least 1");
    if (!(fd_jacobian_step > 0.0)) throw InvalidArgument("SolverConfig: fd_jacobian_step must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("SolverConfig: dt must be positive");
    if (!(t_end > 0.0)) throw InvalidArgument("SolverConfig: t_end must be positive");
}

Constraints Constraints::none(const Grid& g) {
    return {std::vector<char>(3 * g.node_count(), 0), std::vector<char>(3 * g.node_count(), 0)};
}

DofMap::DofMap(const Constraints& c) {
    for (std::size_t i = 0; i < c.chi_fixed.size(); ++i)
        if (!c.chi_fixed[i]) chi_.push_back(i);
    for (std::size_t i = 0; i < c.phi_fixed.size(); ++i)
        if (!c.phi_fixed[i]) phi_.push_back(i);
}

std::vector<double> DofMap::gather(const PlacementState& p) const {
    std::vector<double> x;
    x.reserve(size());
    for (std::size_t i : chi_) x.push_back(p.chi_s[i / 3][static_cast<int>(i % 3)]);
    for (std::size_t i : phi_) x.push_back(p.phi_f[i / 3][static_cast<int>(i % 3)]);
    return x;
}

void DofMap::scatter(const std::vector<double>& x, PlacementState& p) const {
    std::size_t j = 0;
    for (std::size_t i : chi_) p.chi_s[i / 3][static_cast<int>(i % 3)] = x[j++];
    for (std::size_t i : phi_) p.phi_f[i / 3][static_cast<int>(i % 3)] = x[j++];
}

std::vector<double> DofMap::restrict(const NodalForces& f) const {
    std::vector<double> r;
    r.reserve(size());
    for (std::size_t i : chi_) r.push_back(f.chi[i / 3][static_cast<int>(i % 3)]);
    for (std::size_t i : phi_) r.push_back(f.phi[i / 3][static_cast<int>(i % 3)]);
    return r;
}

RelativeVelocity relative_velocity(const KinematicDerived& k, const Field<Vec3>& phi, const Field<Vec3>& phi_prev,
                                   double dt) {
    if (!std::isfinite(dt)) return Field<Vec3>(k.grid());
    return make_field(k.grid(), [&](std::size_t n) {
        return (-1.0 / dt) * dot(k.F_s[n], dot(k.Phi_inv[n], phi[n] - phi_prev[n]));
    });
}

NodalForces step_residual(const PoroProblem& problem, const PlacementState& p, const PlacementState& prev, double dt) {
    NodalForces r = energy_gradient(p, problem.model);
    const NodalForces ext = external_forces(p, problem.model.rho_f0, problem.loads);
    r.chi -= ext.chi;
    r.phi -= ext.phi;
    if (std::isfinite(dt)) {
        const KinematicDerived k = compute_kinematics(p);
        const NodalForces diss = dissipation_forces(p, problem.diss, relative_velocity(k, p.phi_f, prev.phi_f, dt));
        r.chi -= diss.chi;
        r.phi -= diss.phi;
    }
    return r;
}

NewtonReport newton_step(const PoroProblem& problem, PlacementState& p, const PlacementState& prev, double dt,
                         const SolverConfig& cfg) {
    const DofMap dofs(problem.constraints);
    const std::size_t n = dofs.size();
    std::vector<double> x = dofs.gather(p);
    const std::vector<double> r = dofs.restrict(step_residual(problem, p, prev, dt));
    NewtonReport rep;
    rep.norm_before = rep.norm_after = norm2(r);
    if (rep.norm_before == 0.0 || n == 0) return rep;

    Eigen::MatrixXd J(n, n);
    PlacementState trial = p;
    for (std::size_t j = 0; j < n; ++j) {
        const double h = cfg.fd_jacobian_step * std::max(1.0, std::abs(x[j]));
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        dofs.scatter(xp, trial);
        const auto rp = dofs.restrict(step_residual(problem, trial, prev, dt));
        dofs.scatter(xm, trial);
        const auto rm = dofs.restrict(step_residual(problem, trial, prev, dt));
        for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (rp[i] - rm[i]) / (2 * h);
    }
    // Positions are stored absolutely, so R cannot resolve changes below one
    // ulp of x: ‖R‖ ≲ ε·‖|J|·|x|‖ is the best attainable.
    {
        Eigen::VectorXd ax(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) ax(static_cast<Eigen::Index>(i)) = std::max(1.0, std::abs(x[i]));
        rep.roundoff_floor = std::numeric_limits<double>::epsilon() * (J.cwiseAbs() * ax).norm();
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "newton_step: singular Jacobian (reciprocal condition %.3e)", rcond);
        throw SolverFailure(buf);
    }
    const Eigen::VectorXd dx = lu.solve(-Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(n)));

    double alpha = 1.0;
    for (int halving = 0; halving <= 20; ++halving, alpha *= 0.5) {
        std::vector<double> xt = x;
        for (std::size_t i = 0; i < n; ++i) xt[i] += alpha * dx(static_cast<Eigen::Index>(i));
        dofs.scatter(xt, trial);
        double nt = 0.0;
        try {
            nt = norm2(dofs.restrict(step_residual(problem, trial, prev, dt)));
        } catch (const SingularConfiguration&) {
            continue;
        } catch (const DegenerateMass&) {
            continue;
        }
        if (nt < rep.norm_before) {
            p = trial;
            rep.norm_after = nt;
            rep.halvings = halving;
            return rep;
        }
    }
    if (rep.norm_before <= rep.roundoff_floor) {
        rep.stagnated = true;
        return rep;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "newton_step: residual did not decrease after 20 halvings (norm %.6e, round-off floor %.3e)",
                  rep.norm_before, rep.roundoff_floor);
    throw LineSearchFailure(buf);
}

SolveReport solve_step(const PoroProblem& problem, PlacementState& p, const PlacementState& prev, double dt,
                       const SolverConfig& cfg) {
    const DofMap dofs(problem.constraints);
    SolveReport rep;
    rep.initial_norm = norm2(dofs.restrict(step_residual(problem, p, prev, dt)));
    const double ext = norm2(dofs.restrict(external_forces(p, problem.model.rho_f0, problem.loads)));
    rep.tolerance = cfg.newton_tol * std::max(rep.initial_norm, ext);
    rep.final_norm = rep.initial_norm;
    rep.history.push_back(rep.initial_norm);
    while (rep.final_norm > rep.tolerance) {
        if (rep.iterations >= cfg.max_iter) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "solve_step: no convergence in %d iterations (residual %.6e, tolerance %.6e)",
                          cfg.max_iter, rep.final_norm, rep.tolerance);
            throw SolverFailure(buf);
        }
        const NewtonReport nr = newton_step(problem, p, prev, dt, cfg);
        ++rep.iterations;
        if (nr.stagnated) {
            rep.roundoff_limited = true;
            break;
        }
        rep.final_norm = nr.norm_after;
        rep.history.push_back(rep.final_norm);
    }
    return rep;
}

StepRecord make_record(const PoroProblem& problem, const PlacementState& p, const PlacementState& prev, double dt,
                       double t, int step) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, problem.model.rho_f0);
    const EnergyDerivatives d = energy_partials(k, m, grad(m), problem.model);
    StepRecord rec{step, t, problem.model.rho_f0 * d.dPsi_dmf, m, integrate(m), 0.0, 0.0, 0.0, {}};
    rec.energy = integrate(energy_density(k, m, grad(m), problem.model));
    rec.total_potential = rec.energy + problem.loads.p_ext * integrate(k.J_s) - problem.loads.mu_ext * rec.fluid_mass;
    const RelativeVelocity V = relative_velocity(k, p.phi_f, prev.phi_f, dt);
    const Field<Tensor2> gV = grad(V);
    const Field<Tensor2> L = make_field(g, [&](std::size_t n) { return dot(gV[n], k.F_inv[n]); });
    const Field<double> pw = dissipation_power(problem.diss, V, L);
    rec.dissipation_rate = integrate(make_field(g, [&](std::size_t n) { return k.J_s[n] * pw[n]; }));
    return rec;
}

Trajectory advance_time(const PoroProblem& problem, const TimeState& initial, const SolverConfig& cfg,
                        const StepObserver& observer, const std::string& failure_checkpoint) {
    cfg.validate();
    Trajectory tr{{}, initial};
    const auto steps = static_cast<int>(std::llround((cfg.t_end - initial.t) / cfg.dt));
    StepRecord first = make_record(problem, initial.placement, initial.placement, cfg.dt, initial.t, 0);
    if (observer) observer(first, initial.placement);
    tr.records.push_back(std::move(first));
    PlacementState prev = initial.placement;
    for (int s = 1; s <= steps; ++s) {
        const double t = initial.t + s * cfg.dt;
        PlacementState p = prev;
        SolveReport rep;
        try {
            rep = solve_step(problem, p, prev, cfg.dt, cfg);
        } catch (const SolverFailure& e) {
            std::string msg = std::string(e.what()) + " at step " + std::to_string(s);
            if (!failure_checkpoint.empty()) {
                write_checkpoint(failure_checkpoint, tr.final_state, problem.model.rho_f0);
                msg += "; last good state written to " + failure_checkpoint;
            }
            throw SolverFailure(msg);
        }
        StepRecord rec = make_record(problem, p, prev, cfg.dt, t, s);
        rec.solve = std::move(rep);
        if (observer) observer(rec, p);
        tr.records.push_back(std::move(rec));
        tr.final_state = {t, p};
        prev = p;
    }
    return tr;
}

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_checkpoint(const std::string& path, const TimeState& state, double rho_f0) {
    const Grid& g = state.placement.grid();
    const Field<double> m = fluid_mass_content(compute_kinematics(state.placement), rho_f0);
    std::ostringstream os;
    char buf[512];
    os << "sgporo-checkpoint\nversion " << kCheckpointVersion << "\n";
    std::snprintf(buf, sizeof buf, "t %.17g\n", state.t);
    os << buf;
    os << "extents " << g.extents()[0] << ' ' << g.extents()[1] << ' ' << g.extents()[2] << "\n";
    std::snprintf(buf, sizeof buf, "spacing %.17g %.17g %.17g\norigin %.17g %.17g %.17g\n", g.spacing()[0],
                  g.spacing()[1], g.spacing()[2], g.origin()[0], g.origin()[1], g.origin()[2]);
    os << buf;
    os << "mode " << (g.periodic() ? "periodic" : "box") << "\n";
    std::snprintf(buf, sizeof buf, "rho_f0 %.17g\n", rho_f0);
    os << buf;
    os << "nodes " << g.node_count() << "\n";
    os << "# node chi_x chi_y chi_z phi_x phi_y phi_z m_f\n";
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Vec3& c = state.placement.chi_s[n];
        const Vec3& f = state.placement.phi_f[n];
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", n, c[0], c[1], c[2], f[0],
                      f[1], f[2], m[n]);
        os << buf;
    }
    atomic_write(path, os.str());
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_checkpoint: cannot open " + path);
    auto expect = [&](const std::string& key) {
        std::string k;
        if (!(in >> k) || k != key) throw ConfigError("read_checkpoint: expected '" + key + "' in " + path);
    };
    std::string magic;
    if (!(in >> magic) || magic != "sgporo-checkpoint") throw ConfigError("read_checkpoint: not a checkpoint file: " + path);
    expect("version");
    int version = 0;
    if (!(in >> version) || version != kCheckpointVersion)
        throw ConfigError("read_checkpoint: unsupported version " + std::to_string(version));
    double t = 0.0, rho = 0.0;
    std::array<int, 3> ext{};
    std::array<double, 3> h{};
    Vec3 origin;
    std::string mode;
    std::size_t count = 0;
    expect("t");
    in >> t;
    expect("extents");
    in >> ext[0] >> ext[1] >> ext[2];
    expect("spacing");
    in >> h[0] >> h[1] >> h[2];
    expect("origin");
    in >> origin[0] >> origin[1] >> origin[2];
    expect("mode");
    in >> mode;
    expect("rho_f0");
    in >> rho;
    expect("nodes");
    in >> count;
    if (!in || (mode != "box" && mode != "periodic")) throw ConfigError("read_checkpoint: malformed header in " + path);
    in >> std::ws;
    if (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
    }
    const Grid g(ext, h, mode == "box" ? BoundaryMode::box : BoundaryMode::periodic, origin);
    if (count != g.node_count()) throw ConfigError("read_checkpoint: node count does not match extents");
    Checkpoint cp{{t, PlacementState::identity(g)}, rho, Field<double>(g)};
    for (std::size_t n = 0; n < count; ++n) {
        std::size_t idx = 0;
        Vec3 c, f;
        double m = 0.0;
        if (!(in >> idx >> c[0] >> c[1] >> c[2] >> f[0] >> f[1] >> f[2] >> m) || idx != n)
            throw ConfigError("read_checkpoint: malformed node record " + std::to_string(n));
        cp.state.placement.chi_s[n] = c;
        cp.state.placement.phi_f[n] = f;
        cp.m_f[n] = m;
    }
    return cp;
}

}  // namespace sgporo
