#include "sgporo/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "sgporo/diff_ops.hpp"
#include "sgporo/sampling.hpp"

namespace sgporo {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double l2(const Field<Vec3>& f) {
    double s = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) s += f.grid().weight(n) * dot(f[n], f[n]);
    return std::sqrt(s);
}

// Errors measured on a sequence of grids with spacing h; orders between
// consecutive grids.
struct Refinement {
    std::vector<double> h, err;

    void add(double spacing, double e) {
        h.push_back(spacing);
        err.push_back(e);
    }
    std::vector<double> orders() const {
        std::vector<double> o;
        for (std::size_t i = 1; i < err.size(); ++i) o.push_back(std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]));
        return o;
    }
    double min_order() const {
        const auto o = orders();
        return o.empty() ? 0.0 : *std::min_element(o.begin(), o.end());
    }
    double finest_order() const {
        const auto o = orders();
        return o.empty() ? 0.0 : o.back();
    }
    std::string describe() const { return "errors [" + join(err) + "], orders [" + join(orders()) + "]"; }
};

CheckResult at_most(int crit, std::string name, std::string metric, double value, double threshold,
                    std::string details = {}) {
    CheckResult r;
    r.criterion = crit;
    r.name = std::move(name);
    r.metric = std::move(metric);
    r.value = value;
    r.threshold = threshold;
    r.comparison = "<=";
    r.passed = std::isfinite(value) && value <= threshold;
    r.details = std::move(details);
    return r;
}

CheckResult at_least(int crit, std::string name, std::string metric, double value, double threshold,
                     std::string details = {}) {
    CheckResult r = at_most(crit, std::move(name), std::move(metric), value, threshold, std::move(details));
    r.comparison = ">=";
    r.passed = std::isfinite(value) && value >= threshold;
    return r;
}

CheckResult below(int crit, std::string name, std::string metric, double value, double threshold,
                  std::string details = {}) {
    CheckResult r = at_most(crit, std::move(name), std::move(metric), value, threshold, std::move(details));
    r.comparison = "<";
    r.passed = std::isfinite(value) && value < threshold;
    return r;
}

PlacementState random_state(const Grid& g, Sampler& s, double amp) {
    return {perturbed_identity(g, s, amp), perturbed_identity(g, s, amp)};
}

// Redraws until both maps are invertible on the grid. On coarse box grids the
// one-sided closures can fold a draw that is small in the continuum.
PlacementState admissible_state(const Grid& g, Sampler& s, double amp, int& rejected) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        PlacementState p = random_state(g, s, amp);
        if (check_diffeomorphism(p).ok()) return p;
        ++rejected;
    }
    throw InternalConsistency("admissible_state: no invertible draw in 1000 attempts");
}

PlacementState admissible_state(const Grid& g, Sampler& s, double amp) {
    int ignored = 0;
    return admissible_state(g, s, amp, ignored);
}

// Convergence verdict on a refinement study. Errors already at the round-off
// floor on the finest grid pass: the identity holds exactly for that draw.
CheckResult order_check(int crit, std::string name, const Refinement& r, double floor, bool finest_only,
                        const std::string& grids) {
    CheckResult c = at_least(crit, std::move(name), finest_only ? "observed order (finest pair)" : "min observed order",
                             finest_only ? r.finest_order() : r.min_order(), 1.8, grids + "; " + r.describe());
    if (!c.passed && r.err.back() <= floor) {
        c.passed = true;
        c.details = "errors at round-off level (<= " + num(floor) + "), identity exact for this draw; " + c.details;
    }
    return c;
}

// Sinusoidal plus non-periodic polynomial parts, so boundary terms are active.
Variation random_variation(const Grid& g, Sampler& s, double amp) {
    Field<Vec3> a = smooth_vector_field(g, s, amp);
    Field<Vec3> b = smooth_vector_field(g, s, amp);
    a += polynomial_vector_field(g, s, amp);
    b += polynomial_vector_field(g, s, amp);
    return {a, b};
}

PlacementState shifted(const PlacementState& p, const Variation& v, double h) {
    PlacementState q = p;
    for (std::size_t n = 0; n < q.chi_s.size(); ++n) {
        q.chi_s[n] += h * v.delta_chi_s[n];
        q.phi_f[n] += h * v.delta_phi_f[n];
    }
    return q;
}

EnergyModel gradient_model(Sampler& s) {
    EnergyModel m;
    m.kappa_s = s.uniform(0.0, 0.2);
    m.kappa_f = s.uniform(0.0, 0.2);
    return m;
}

Field<Tensor2> tensor_field(const Grid& g, Sampler& s) {
    const Field<Vec3> r0 = smooth_vector_field(g, s, 1.0), r1 = smooth_vector_field(g, s, 1.0),
                      r2 = smooth_vector_field(g, s, 1.0);
    Field<Tensor2> A(g);
    for (std::size_t i = 0; i < A.size(); ++i)
        for (int j = 0; j < 3; ++j) {
            A[i](0, j) = r0[i][j];
            A[i](1, j) = r1[i][j];
            A[i](2, j) = r2[i][j];
        }
    return A;
}

Field<Tensor3> tensor3_field(const Grid& g, Sampler& s) {
    const Field<Tensor2> a = tensor_field(g, s), b = tensor_field(g, s), c = tensor_field(g, s);
    Field<Tensor3> t(g);
    for (std::size_t n = 0; n < t.size(); ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                t[n](i, j, 0) = a[n](i, j);
                t[n](i, j, 1) = b[n](i, j);
                t[n](i, j, 2) = c[n](i, j);
            }
    return t;
}

// ---------------------------------------------------------------- group 1

// Integral of the magnitudes of the four terms of δ𝒜. Round-off in the
// difference quotient scales with this, not with |δ𝒜|, so a variation that
// nearly cancels is compared against it.
double variation_magnitude(const PlacementState& p, const EnergyModel& model, const Variation& v) {
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, model.rho_f0);
    const EnergyDerivatives d = energy_partials(k, m, grad(m), model);
    const Field<Tensor2> de = delta_strain(k, v);
    const Field<double> dm = delta_mass(k, m, v);
    const Field<Tensor3> gde = grad(de);
    const Field<Vec3> gdm = grad(dm);
    return integrate(make_field(p.grid(), [&](std::size_t n) {
        return std::abs(ddot(d.dPsi_deps[n], de[n])) + std::abs(d.dPsi_dmf[n] * dm[n]) +
               std::abs(tdot(d.dPsi_dgrad_eps[n], gde[n])) + std::abs(dot(d.dPsi_dgrad_mf[n], gdm[n]));
    }));
}

CheckResult variation_oracle(const VerifyOptions& o) {
    Sampler s(o.seed * 1000 + 1);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const double h = 1e-5;
    double worst = 0.0, worst_plain = 0.0;
    int rejected = 0, cancelling = 0;
    double cancel_ratio = 0.0;
    for (int trial = 0; trial < o.cases; ++trial) {
        const EnergyModel model = gradient_model(s);
        const PlacementState p = admissible_state(g, s, 0.01, rejected);
        const Variation v = random_variation(g, s, 0.1);
        const double direct = first_variation_direct(p, model, v);
        const double fd =
            (energy_functional(shifted(p, v, h), model) - energy_functional(shifted(p, v, -h), model)) / (2 * h);
        const double scale = variation_magnitude(p, model, v);
        const double plain = std::abs(direct - fd) / std::abs(direct);
        worst = std::max(worst, std::abs(direct - fd) / std::max(std::abs(direct), scale));
        worst_plain = std::max(worst_plain, plain);
        if (plain >= 1e-6) {
            ++cancelling;
            cancel_ratio = std::max(cancel_ratio, std::abs(direct) / scale);
        }
    }
    return below(1, "first_variation_direct vs central difference of the discrete energy",
                 "max |direct - fd| / max(|direct|, integral of term magnitudes)", worst, 1e-6,
                 std::to_string(o.cases) + " random pairs on 8^3, h = 1e-5; max error relative to |direct| alone " +
                     num(worst_plain) + " (" + std::to_string(cancelling) + " pairs above 1e-6, largest |direct| / magnitude among them " +
                     num(cancel_ratio) + "); " + std::to_string(rejected) + " non-invertible draws redrawn");
}

// ---------------------------------------------------------------- group 2

// The signed error of a single variation can change sign between grids, which
// makes a two-grid order meaningless for it; the family is judged by its
// worst-case error per grid and the individual orders are reported.
CheckResult integration_by_parts(const VerifyOptions& o) {
    EnergyModel model;
    model.kappa_s = model.kappa_f = 0.1;
    const std::vector<int> sizes{8, 16, 32};
    Refinement family;
    std::vector<std::vector<double>> err(10);
    // Each trial's stream is fixed once, on the coarsest grid, so every grid
    // samples the same fields.
    std::vector<std::uint64_t> streams;
    const Grid coarse = Grid::cube(sizes.front(), 1.0, BoundaryMode::box);
    for (std::uint64_t id = o.seed * 1000 + 100; streams.size() < 10; id += 7919) {
        Sampler s(id);
        if (check_diffeomorphism(random_state(coarse, s, 0.01)).ok()) streams.push_back(id);
    }
    for (int n : sizes) {
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::box);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Sampler s(streams[static_cast<std::size_t>(trial)]);
            const PlacementState p = random_state(g, s, 0.01);
            const Variation v = random_variation(g, s, 1.0);
            const double e =
                std::abs(first_variation_assembled(p, model, v).total - first_variation_direct(p, model, v));
            err[static_cast<std::size_t>(trial)].push_back(e);
            worst = std::max(worst, e);
        }
        family.add(g.spacing()[0], worst);
    }
    std::vector<double> individual;
    for (const auto& e : err) {
        Refinement r;
        for (std::size_t i = 0; i < e.size(); ++i) r.add(1.0 / (sizes[i] - 1), e[i]);
        individual.push_back(r.finest_order());
    }
    std::sort(individual.begin(), individual.end());
    return at_least(2, "assembled (integrated by parts) vs direct first variation, 10 boundary-active variations",
                    "min order of the worst-case error over 8^3->16^3->32^3", family.min_order(), 1.8,
                    "worst-case " + family.describe() + "; individual 16^3->32^3 orders [" + join(individual) + "]");
}

// ---------------------------------------------------------------- group 3

std::vector<CheckResult> identities(const VerifyOptions& o) {
    std::vector<CheckResult> out;
    const auto& T3 = o.transpose3;
    Sampler s(o.seed * 1000 + 200);
    double e_def = 0.0, e_contr = 0.0, e_perm = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Tensor3 t = s.tensor3();
        const Tensor2 A = s.tensor2(), B = s.tensor2(), C = s.tensor2();
        const Vec3 a = s.vec();
        const Tensor3 tt = T3(t);
        // (t^T)_kij = t_ijk
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(tt(k, i, j) - t(i, j, k)));
        e_def = std::max(e_def, d);
        // (t^T : A)·a = A : (t·a), against an index loop.
        double loop = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) loop += A(i, j) * t(i, j, k) * a[k];
        e_contr = std::max({e_contr, rel(dot(ddot(tt, A), a), loop), rel(ddot(A, dot(t, a)), loop)});
        // A:(B·C) = (B^T·A):C = (A·C^T):B
        const double v = ddot(A, dot(B, C));
        e_perm = std::max({e_perm, rel(ddot(dot(transpose(B), A), C), v), rel(ddot(dot(A, transpose(C)), B), v)});
    }
    out.push_back(at_most(3, "third-order transpose definition (t^T)_kij = t_ijk", "max abs error, 1000 tensors",
                          e_def, 1e-13));
    out.push_back(at_most(3, "(t^T : A)·a = A : (t·a)", "max relative error, 1000 triples", e_contr, 1e-13));
    out.push_back(at_most(3, "A:(B·C) = (B^T·A):C = (A·C^T):B", "max relative error, 1000 triples", e_perm, 1e-13));

    // Differential identities on periodic grids.
    Refinement r1, r2, r3, r4;
    for (int n : {16, 32, 64}) {
        Sampler f(o.seed * 1000 + 201);
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::periodic);
        const Field<double> lam = smooth_scalar_field(g, f, 1.0);
        const Field<Vec3> a = smooth_vector_field(g, f, 1.0);
        const Field<Tensor2> A = tensor_field(g, f);
        const Field<Tensor3> t = tensor3_field(g, f);
        const auto la = make_field(g, [&](std::size_t i) { return lam[i] * a[i]; });
        const auto lA = make_field(g, [&](std::size_t i) { return lam[i] * A[i]; });
        const auto Ata = make_field(g, [&](std::size_t i) { return dot(transpose(A[i]), a[i]); });
        const auto tA = make_field(g, [&](std::size_t i) { return ddot(T3(t[i]), A[i]); });
        const auto gl = grad(lam);
        const auto ga = grad(a);
        const auto gA = grad(A);
        const auto da = div(a);
        const auto dA = div(A);
        const auto dt = div(t);
        const auto l1 = div(la);
        const auto l2v = div(lA);
        const auto l3 = div(Ata);
        const auto l4 = div(tA);
        double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            m1 = std::max(m1, std::abs(l1[i] - dot(a[i], gl[i]) - lam[i] * da[i]));
            m2 = std::max(m2, norm(l2v[i] - dot(A[i], gl[i]) - lam[i] * dA[i]));
            m3 = std::max(m3, std::abs(l3[i] - ddot(A[i], ga[i]) - dot(a[i], dA[i])));
            m4 = std::max(m4, std::abs(l4[i] - ddot(A[i], dt[i]) - tdot(t[i], gA[i])));
        }
        const double h = g.spacing()[0];
        r1.add(h, m1);
        r2.add(h, m2);
        r3.add(h, m3);
        r4.add(h, m4);
    }
    const std::string grids = "periodic 16^3/32^3/64^3";
    out.push_back(order_check(3, "div(λa) = a·∇λ + λ div a", r1, 1e-11, true, grids));
    out.push_back(order_check(3, "div(λA) = A·∇λ + λ div A", r2, 1e-11, true, grids));
    out.push_back(order_check(3, "div(A^T·a) = A:∇a + a·div A", r3, 1e-11, true, grids));
    out.push_back(order_check(3, "div(t^T:A) = A:div t + t⋮∇A", r4, 1e-11, true, grids));

    // ∇a = ∇^S a + (∂a/∂n)⊗n on every box face, against the exact gradient.
    Refinement rs;
    for (int n : {8, 16, 32}) {
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::box);
        auto field = [](const Vec3& x) {
            return Vec3{{std::exp(0.7 * x[0] - 0.4 * x[1] * x[1]) * std::cos(1.3 * x[2] + 0.2),
                         std::sin(x[0] + 2 * x[2]), x[1] * x[1] * x[0]}};
        };
        auto exact = [](const Vec3& x) {
            const double e = std::exp(0.7 * x[0] - 0.4 * x[1] * x[1]);
            Tensor2 G;
            G(0, 0) = 0.7 * e * std::cos(1.3 * x[2] + 0.2);
            G(0, 1) = -0.8 * x[1] * e * std::cos(1.3 * x[2] + 0.2);
            G(0, 2) = -1.3 * e * std::sin(1.3 * x[2] + 0.2);
            G(1, 0) = std::cos(x[0] + 2 * x[2]);
            G(1, 2) = 2 * std::cos(x[0] + 2 * x[2]);
            G(2, 0) = x[1] * x[1];
            G(2, 1) = 2 * x[1] * x[0];
            return G;
        };
        const Field<Vec3> a = make_field(g, [&](std::size_t i) { return field(g.position(i)); });
        double e = 0.0;
        for (const Face& f : g.faces()) {
            const auto nodes = g.face_nodes(f);
            const auto sg = surface_grad(a, f);
            const auto dn = normal_derivative(a, f);
            for (std::size_t i = 0; i < nodes.size(); ++i)
                e = std::max(e, norm(sg[i] + outer(dn[i], f.normal()) - exact(g.position(nodes[i]))));
        }
        rs.add(g.spacing()[0], e);
    }
    out.push_back(order_check(3, "∇a = ∇^S a + (∂a/∂n)⊗n on box faces", rs, 1e-11, false, "box 8^3/16^3/32^3"));

    // Piola identity div[det(∇φ)(∇φ)^{-T}] = 0.
    for (BoundaryMode mode : {BoundaryMode::periodic, BoundaryMode::box}) {
        Refinement r;
        for (int n : {16, 32, 64}) {
            const Grid g = Grid::cube(n, 1.0, mode);
            Sampler f(o.seed * 1000 + 202);
            r.add(g.spacing()[0], max_abs(piola_residual(perturbed_identity(g, f, 0.01))));
        }
        const std::string m = mode == BoundaryMode::box ? "box" : "periodic";
        out.push_back(order_check(3, "Piola identity residual, " + m + " grids", r, 1e-11, true, m + " 16^3/32^3/64^3"));
    }

    // Flux push-forward: J_s (div w)∘χ_s = div_s M.
    Refinement rf;
    for (int n : {16, 32, 64}) {
        Sampler f(o.seed * 1000 + 203);
        const Grid g({n, n, 1}, {1.0 / n, 1.0 / n, 1.0}, BoundaryMode::periodic);
        const auto k = compute_kinematics(random_state(g, f, 0.02));
        const auto m = fluid_mass_content(k, 1.0);
        const auto Vs = smooth_vector_field(g, f, 0.5);
        const auto Vf = smooth_vector_field(g, f, 0.5);
        rf.add(g.spacing()[0],
               max_abs(eulerian_flux_divergence(k, m, Vs, Vf) - div(lagrangian_flux(k, m, Vs, Vf))));
    }
    out.push_back(order_check(3, "mass flux identity J_s (div w)∘χ_s = div_s M", rf, 1e-11, true,
                              "periodic 16^2/32^2/64^2"));
    return out;
}

// ---------------------------------------------------------------- group 4

std::vector<CheckResult> basic_variations(const VerifyOptions& o) {
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const double h = 1e-5, rho = 1.7;
    Sampler s(o.seed * 1000 + 300);
    double e_eps = 0.0, e_m = 0.0;
    int rejected = 0;
    for (int trial = 0; trial < o.cases; ++trial) {
        const PlacementState p = admissible_state(g, s, 0.003, rejected);
        const Variation v = random_variation(g, s, 1.0);
        const auto k = compute_kinematics(p);
        const auto kp = compute_kinematics(shifted(p, v, h));
        const auto km = compute_kinematics(shifted(p, v, -h));
        const auto de = delta_strain(k, v);
        const auto dm = delta_mass(k, fluid_mass_content(k, rho), v);
        const auto mp = fluid_mass_content(kp, rho);
        const auto mm = fluid_mass_content(km, rho);
        double ee = 0.0, em = 0.0;
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            ee = std::max(ee, max_abs((kp.epsilon[n] - km.epsilon[n]) / (2 * h) - de[n]));
            em = std::max(em, std::abs((mp[n] - mm[n]) / (2 * h) - dm[n]));
        }
        e_eps = std::max(e_eps, ee / max_abs(de));
        e_m = std::max(e_m, em / max_abs(dm));
    }
    const std::string d = std::to_string(o.cases) + " random cases on 8^3, h = 1e-5, " + std::to_string(rejected) +
                          " non-invertible draws redrawn";
    return {below(4, "δε = sym(F^T·∇δχ_s) vs central difference", "max relative error", e_eps, 1e-6, d),
            below(4, "δm_f = m_f Φ^{-T}:∇δφ_f vs central difference", "max relative error", e_m, 1e-6, d)};
}

// ---------------------------------------------------------------- group 5

std::vector<CheckResult> momentum_pullback(const VerifyOptions& o) {
    std::vector<CheckResult> out;
    EnergyModel first;
    first.kappa_s = first.kappa_f = 0.0;
    Refinement r;
    double compat = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::periodic);
        Sampler s(o.seed * 1000 + 400);
        const auto c = momentum_pullback_check(random_state(g, s, 0.02), first);
        compat = std::max(compat, max_abs(c.compatibility_residual));
        r.add(g.spacing()[0], l2(c.difference));
    }
    out.push_back(order_check(5, "Eulerian vs Lagrangian momentum residual, first-gradient limit", r, 1e-11, true,
                              "periodic 16^3/32^3/64^3, compatibility residual " + num(compat)));

    EnergyModel grad_model = first;
    grad_model.kappa_s = 0.05;
    Refinement rg;
    double diff = 0.0, term = 0.0, strain = 0.0;
    for (int n : {64, 128, 256}) {
        const Grid g({n, n, 1}, {1.0 / n, 1.0 / n, 1.0}, BoundaryMode::periodic);
        Sampler s(o.seed * 1000 + 401);
        const PlacementState p = random_state(g, s, 1e-4);
        const auto c = momentum_pullback_check(p, grad_model);
        strain = max_abs(compute_kinematics(p).epsilon);
        rg.add(g.spacing()[0], l2(c.difference - c.compatibility_term));
        diff = l2(c.difference);
        term = l2(c.compatibility_term);
    }
    out.push_back(order_check(5, "κ_s > 0: difference minus compatibility term", rg, 1e-15, false,
                              "periodic 64^2/128^2/256^2, max|ε| = " + num(strain)));
    // ‖difference‖ ≤ ‖compatibility term‖ + ‖O(h²) remainder‖ on the finest grid.
    const double excess = diff - term - rg.err.back();
    out.push_back(at_most(5, "κ_s > 0: difference bounded by compatibility term + O(h²)",
                          "‖diff‖ − ‖compat‖ − ‖remainder‖ (finest grid)", excess, 0.0,
                          "‖diff‖ = " + num(diff) + ", ‖compat‖ = " + num(term) + ", ‖remainder‖ = " +
                              num(rg.err.back())));
    return out;
}

// ---------------------------------------------------------------- group 6

std::vector<CheckResult> thermodynamics(const VerifyOptions& o) {
    std::vector<CheckResult> out;
    Sampler s(o.seed * 1000 + 500);
    const Grid g({10, 10, 10}, {0.1, 0.1, 0.1}, BoundaryMode::box);
    double worst = kInf;
    long count = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const DissipationModel dm(s.spd(0.01, 3.0), s.spd(0.0, 1.0));
        Field<Vec3> v(g);
        Field<Tensor2> L(g);
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            v[n] = s.vec();
            L[n] = s.tensor2();
        }
        const auto pw = dissipation_power(dm, v, L);
        for (std::size_t n = 0; n < g.node_count(); ++n) worst = std::min(worst, pw[n]);
        count += static_cast<long>(g.node_count());
    }
    out.push_back(at_least(6, "dissipation power non-negative", "min nodal dissipation power", worst, 0.0,
                           std::to_string(count) + " random states over 10 random SPD models"));

    const Grid gs = Grid::cube(8, 1.0, BoundaryMode::box);
    EnergyModel first;
    first.kappa_s = first.kappa_f = 0.0;
    double res = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto k = compute_kinematics(admissible_state(gs, s, 0.01));
        const auto m = fluid_mass_content(k, 1.0);
        Field<Tensor2> ed(gs);
        const auto a = smooth_vector_field(gs, s, 0.1), b = smooth_vector_field(gs, s, 0.1);
        for (std::size_t n = 0; n < gs.node_count(); ++n)
            ed[n] = sym(outer(a[n], Vec3::unit(0)) + outer(b[n], Vec3::unit(1)));
        const auto md = smooth_scalar_field(gs, s, 0.1);
        res = std::max(res, max_abs(solid_dissipation_residual(k, m, {ed, md, grad(ed), grad(md)}, first).residual));
    }
    out.push_back(at_most(6, "solid dissipation residual vanishes for κ_s = κ_f = 0", "max |residual|", res, 1e-12,
                          "5 random states and rates on 8^3"));
    return out;
}

// ------------------------------------------------ group 0 (work equivalences)

std::vector<CheckResult> work_equivalences(const VerifyOptions& o) {
    std::vector<CheckResult> out;
    {
        Sampler s(o.seed * 1000 + 600);
        const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
        const DissipationModel dm(s.spd(0.5, 2.0), Tensor2{});
        const auto p = admissible_state(g, s, 0.005);
        const auto V = smooth_vector_field(g, s, 0.3);
        const auto v = random_variation(g, s, 1.0);
        const double a = dissipation_work(p, dm, V, v), b = dissipation_work_eulerian(p, dm, V, v);
        out.push_back(at_most(0, "Darcy work: reference form = current form", "relative difference",
                              std::abs(a - b) / std::abs(a), 1e-13));
    }
    Refinement rb;
    for (int n : {16, 32, 64}) {
        const Grid g({n, n, 1}, {1.0 / (n - 1), 1.0 / (n - 1), 1.0}, BoundaryMode::box);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            Sampler s(o.seed * 1000 + 601 + static_cast<std::uint64_t>(trial));
            const DissipationModel dm(s.spd(0.5, 2.0), s.spd(0.1, 1.0));
            const auto p = random_state(g, s, 0.02);
            const auto V = smooth_vector_field(g, s, 0.3);
            const auto v = random_variation(g, s, 1.0);
            worst = std::max(worst, std::abs(dissipation_work(p, dm, V, v) - dissipation_work_eulerian(p, dm, V, v)));
        }
        rb.add(g.spacing()[0], worst);
    }
    out.push_back(order_check(0, "Brinkman work: reference form = current form, worst of 5 instances", rb, 1e-13,
                              true, "box 16^2/32^2/64^2"));
    return out;
}

// ------------------------------------------- groups 7, 8, 9 (consolidation)

ScenarioConfig classical_limit(const ScenarioConfig& base) {
    ScenarioConfig c = base;
    c.model.kappa_s = c.model.kappa_f = 0.0;
    c.brinkman_viscosity = 0.0;
    c.load_history = {{0.0, base.load_history.front().p_ext}};
    return c;
}

struct ConsolidationEvidence {
    ConsolidationResult result;
    double vwr_ratio = 0.0;  // max |VWR| / (tol ‖v‖)
    int vwr_steps = 0;
    int vwr_roundoff = 0;
    double seconds = 0.0;
};

ConsolidationEvidence consolidation_run(const VerifyOptions& o) {
    const ScenarioConfig c = classical_limit(o.scenario);
    ConsolidationEvidence ev;
    Sampler s(o.seed * 1000 + 700);
    const auto t0 = std::chrono::steady_clock::now();
    auto hook = [&](const PoroProblem& pb, const OutputRecord& rec, const PlacementState& p,
                    const PlacementState& prev, const SolveReport& rep) {
        if (rec.step % 10 != 0) return;
        ++ev.vwr_steps;
        if (rep.roundoff_limited) ++ev.vwr_roundoff;
        const Grid& g = p.grid();
        const auto V = relative_velocity(compute_kinematics(p), p.phi_f, prev.phi_f, c.solver.dt);
        for (int trial = 0; trial < 20; ++trial) {
            Variation v{polynomial_vector_field(g, s, 1.0), polynomial_vector_field(g, s, 1.0)};
            double vn = 0.0;
            for (std::size_t n = 0; n < g.node_count(); ++n)
                for (int a = 0; a < 3; ++a) {
                    const std::size_t i = 3 * n + static_cast<std::size_t>(a);
                    if (pb.constraints.chi_fixed[i]) v.delta_chi_s[n][a] = 0.0;
                    if (pb.constraints.phi_fixed[i]) v.delta_phi_f[n][a] = 0.0;
                    vn += v.delta_chi_s[n][a] * v.delta_chi_s[n][a] + v.delta_phi_f[n][a] * v.delta_phi_f[n][a];
                }
            const double r = virtual_work_residual(p, pb.model, pb.diss, pb.loads, V, v);
            ev.vwr_ratio = std::max(ev.vwr_ratio, std::abs(r) / (rep.tolerance * std::sqrt(vn)));
        }
    };
    ev.result = run_consolidation(c, hook);
    ev.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ev;
}

CheckResult terzaghi_limit(const VerifyOptions& o, const ConsolidationEvidence& ev) {
    const auto& recs = ev.result.records;
    double worst = 0.0, at = 0.0;
    bool covers = false;
    for (const OutputRecord& r : recs) {
        if (r.T_v >= 1.0 - 1e-9) covers = true;
        if (r.T_v < 0.05 || r.T_v > 1.0 + 1e-9) continue;
        const double e = std::abs(r.U - terzaghi_reference(r.T_v, 0.0, 200).U);
        if (e > worst) {
            worst = e;
            at = r.T_v;
        }
    }
    const ScenarioConfig& c = o.scenario;
    std::string d = std::to_string(c.nodes) + "-node column, dt = " + num(c.solver.dt) + " s, c_v = " +
                    num(ev.result.biot.consolidation_coefficient) + ", worst at T_v = " + num(at) + ", run " +
                    num(ev.seconds) + " s";
    if (!covers) {
        d += "; run ends before T_v = 1";
        worst = kInf;
    }
    return at_most(7, "degree of consolidation vs classical series (200 terms), T_v in [0.05, 1]",
                   "sup |U − U_series|", worst, 0.02, d);
}

std::vector<CheckResult> conservation(const VerifyOptions& o, const ConsolidationEvidence& ev) {
    std::vector<CheckResult> out;
    const ScenarioConfig c = classical_limit(o.scenario);

    // Both ends closed: φ fixed at top and bottom.
    {
        ScenarioConfig small = c;
        small.nodes = 24;
        const Grid g = Grid::column(small.nodes, small.height);
        PoroProblem pb = column_problem(small, c.load_history.front().p_ext);
        pb.constraints.fix_phi(g.node_count() - 1, 0);
        Sampler s(o.seed * 1000 + 800);
        TimeState init{0.0, {perturbed_identity(g, s, 1e-3), PlacementState::identity(g).phi_f}};
        for (std::size_t n = 0; n < g.node_count(); ++n)
            for (int a = 1; a < 3; ++a) init.placement.chi_s[n][a] = g.position(n)[a];
        init.placement.chi_s[0] = g.position(0);
        SolverConfig cfg = c.solver;
        cfg.t_end = 20 * cfg.dt;
        const auto tr = advance_time(pb, init, cfg);
        double drift = 0.0;
        for (std::size_t i = 1; i < tr.records.size(); ++i) {
            const double m0 = tr.records[i - 1].fluid_mass;
            drift = std::max(drift, std::abs(tr.records[i].fluid_mass - m0) / m0);
        }
        out.push_back(below(8, "fluid mass conserved with both ends impermeable", "max relative drift per step",
                            drift, 1e-10, "24-node column, 20 steps from a perturbed state"));
    }

    const auto& recs = ev.result.records;
    double rise_U = 0.0, rise_pi = 0.0, rise_a = 0.0, scale = 0.0;
    for (const OutputRecord& r : recs) scale = std::max(scale, std::abs(r.total_potential));
    for (std::size_t i = 1; i < recs.size(); ++i) {
        rise_U = std::max(rise_U, recs[i - 1].U - recs[i].U);
        rise_pi = std::max(rise_pi, recs[i].total_potential - recs[i - 1].total_potential);
        rise_a = std::max(rise_a, recs[i].energy - recs[i - 1].energy);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    out.push_back(at_most(8, "U(t) monotone in the consolidation run", "max decrease of U between outputs", rise_U,
                          0.0));
    out.push_back(at_most(8, "total potential 𝒜 + p V − μ M non-increasing under constant load",
                          "max increase between steps", rise_pi, 64 * eps * scale,
                          "threshold 64 ε max|Π|; 𝒜 alone rises by up to " + num(rise_a) +
                              " per step here because the load does work on the column"));

    // Unloaded relaxation from a compressed undrained state: 𝒜 itself must decay.
    {
        ScenarioConfig u = c;
        u.nodes = 24;
        u.model.kappa_f = 1e-3;
        const Grid g = Grid::column(u.nodes, u.height);
        const PoroProblem pb = column_problem(u, 0.0);
        PlacementState p = PlacementState::identity(g);
        for (std::size_t n = 0; n < g.node_count(); ++n) p.chi_s[n][0] = (1.0 - 2e-3) * g.position(n)[0];
        SolverConfig cfg = u.solver;
        cfg.dt = 0.02;
        cfg.t_end = 0.6;
        const auto tr = advance_time(pb, {0.0, p}, cfg);
        double rise = -kInf;
        for (std::size_t i = 1; i < tr.records.size(); ++i)
            rise = std::max(rise, tr.records[i].energy - tr.records[i - 1].energy);
        out.push_back(at_most(8, "energy 𝒜 non-increasing under constant (zero) load", "max increase between steps",
                              rise, 64 * eps * tr.records.front().energy,
                              "24-node column relaxing from uniaxial strain −2e-3, κ_f = 1e-3; 𝒜 from " +
                                  num(tr.records.front().energy) + " to " + num(tr.records.back().energy)));
    }
    return out;
}

CheckResult post_solve(const ConsolidationEvidence& ev) {
    return at_most(9, "virtual work residual after Newton, 20 variations every 10th step",
                   "max |VWR| / (tolerance ‖v‖)", ev.vwr_ratio, 10.0,
                   std::to_string(ev.vwr_steps) + " steps checked, " + std::to_string(ev.vwr_roundoff) +
                       " of them stopped at the round-off floor");
}

// ---------------------------------------------------------------- group 10

std::vector<double> pressure_at(const ScenarioConfig& base, double kappa_f, double t_save) {
    ScenarioConfig c = base;
    c.model.kappa_f = kappa_f;
    c.solver.t_end = t_save;
    return run_consolidation(c).records.back().profile.p;
}

// Half-width of the two-node averaged |Δp| measured from one end: distance
// at which it first drops below half its maximum over that half column.
double layer_width(const std::vector<double>& dp, bool from_bottom, double height) {
    const std::size_t N = dp.size();
    std::vector<double> d(N - 1);
    for (std::size_t n = 0; n + 1 < N; ++n) d[n] = std::abs(0.5 * (dp[n] + dp[n + 1]));
    const std::size_t half = (N - 1) / 2;
    auto at = [&](std::size_t i) { return from_bottom ? d[i] : d[N - 2 - i]; };
    double mx = 0.0;
    for (std::size_t i = 0; i < half; ++i) mx = std::max(mx, at(i));
    std::size_t i = 0;
    while (i < half && at(i) >= 0.5 * mx) ++i;
    return (static_cast<double>(i) + 0.5) / static_cast<double>(N - 1) * height;
}

CheckResult boundary_layer(const VerifyOptions& o) {
    ScenarioConfig c = classical_limit(o.scenario);
    c.nodes = 128;
    c.solver.dt = 1e-2;
    const double cv = biot_constants(c).consolidation_coefficient;
    const double t_save = std::round(0.2 * c.height * c.height / cv / c.solver.dt) * c.solver.dt;
    const auto base = pressure_at(c, 0.0, t_save);
    std::vector<double> wall, top;
    const std::vector<double> kappas{1e-3, 1e-2, 1e-1};
    for (double k : kappas) {
        const auto p = pressure_at(c, k, t_save);
        std::vector<double> dp(p.size());
        for (std::size_t n = 0; n < p.size(); ++n) dp[n] = p[n] - base[n];
        wall.push_back(layer_width(dp, true, c.height));
        top.push_back(layer_width(dp, false, c.height));
    }
    double worst = kInf;
    for (std::size_t i = 1; i < wall.size(); ++i) worst = std::min(worst, wall[i] - wall[i - 1]);
    CheckResult r;
    r.criterion = 10;
    r.name = "pressure boundary-layer width at the impermeable wall grows with κ_f ∈ {1e-3, 1e-2, 1e-1}";
    r.metric = "min increase of wall-layer width between successive κ_f";
    r.value = worst;
    r.threshold = 0.0;
    r.comparison = ">";
    r.passed = worst > 0.0;
    r.details = "128 nodes, T_v = " + num(cv * t_save / (c.height * c.height)) + "; wall widths [" + join(wall) +
                "] m; drained-top widths [" + join(top) + "] m for comparison";
    return r;
}

// ------------------------------------------------------------------ driver

void record(std::vector<CheckResult>& all, std::vector<CheckResult> add, double seconds,
            const VerifyOptions& o) {
    for (auto& r : add) {
        r.seconds = seconds / static_cast<double>(add.size());
        all.push_back(r);
        if (o.progress) o.progress(all.back());
    }
}

}  // namespace

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool VerifyReport::criterion_passed(int criterion) const {
    bool any = false;
    for (const CheckResult& c : checks)
        if (c.criterion == criterion) {
            any = true;
            if (!c.passed) return false;
        }
    return any;
}

std::vector<std::string> VerifyReport::failures() const {
    std::vector<std::string> f;
    for (const CheckResult& c : checks)
        if (!c.passed) f.push_back(c.name);
    return f;
}

std::string VerifyReport::json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["passed"] = passed();
    j["checks"] = nlohmann::ordered_json::array();
    auto finite = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) return v;
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    };
    for (const CheckResult& c : checks) {
        nlohmann::ordered_json e;
        e["criterion"] = c.criterion;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["metric"] = c.metric;
        e["value"] = finite(c.value);
        e["comparison"] = c.comparison;
        e["threshold"] = finite(c.threshold);
        e["details"] = c.details;
        e["seconds"] = c.seconds;
        j["checks"].push_back(e);
    }
    j["failures"] = failures();
    return j.dump(2) + "\n";
}

std::string criterion_title(int criterion) {
    static const char* titles[] = {
        "Supplementary work equivalences",
        "Variation oracle",
        "Integration-by-parts convergence",
        "Tensor and calculus identities",
        "Strain and mass variations",
        "Momentum pull-back",
        "Thermodynamic consistency",
        "Classical consolidation limit",
        "Conservation and monotonicity",
        "Post-solve certification",
        "Second-gradient boundary layer",
    };
    if (criterion < 0 || criterion > kCriterionCount) throw InvalidArgument("criterion_title: no such criterion");
    return titles[criterion];
}

VerifyReport verify_suite(const VerifyOptions& o, const std::vector<int>& criteria) {
    if (o.cases < 1) throw InvalidArgument("verify_suite: cases must be ≥ 1");
    o.scenario.validate();
    std::vector<int> list = criteria;
    if (list.empty())
        for (int i = 0; i <= kCriterionCount; ++i) list.push_back(i);
    for (int c : list)
        if (c < 0 || c > kCriterionCount) throw InvalidArgument("verify_suite: no criterion " + std::to_string(c));

    VerifyReport rep;
    rep.seed = o.seed;
    std::optional<ConsolidationEvidence> evidence;
    auto ev = [&]() -> const ConsolidationEvidence& {
        if (!evidence) evidence = consolidation_run(o);
        return *evidence;
    };
    for (int c : list) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckResult> add;
        try {
            switch (c) {
                case 0: add = work_equivalences(o); break;
                case 1: add = {variation_oracle(o)}; break;
                case 2: add = {integration_by_parts(o)}; break;
                case 3: add = identities(o); break;
                case 4: add = basic_variations(o); break;
                case 5: add = momentum_pullback(o); break;
                case 6: add = thermodynamics(o); break;
                case 7: add = {terzaghi_limit(o, ev())}; break;
                case 8: add = conservation(o, ev()); break;
                case 9: add = {post_solve(ev())}; break;
                case 10: add = {boundary_layer(o)}; break;
            }
        } catch (const std::exception& e) {
            CheckResult f;
            f.criterion = c;
            f.name = criterion_title(c) + " (aborted)";
            f.metric = "exception";
            f.value = std::numeric_limits<double>::quiet_NaN();
            f.details = e.what();
            add.push_back(f);
        }
        record(rep.checks, std::move(add),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), o);
    }
    return rep;
}

}  // namespace sgporo
