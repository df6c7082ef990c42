#include "sgporo/variational.hpp"

#include <algorithm>

#include "sgporo/diff_ops.hpp"

namespace sgporo {

namespace {

Field<double> weights(const Grid& g) {
    return make_field(g, [&](std::size_t n) { return g.weight(n); });
}

// Everything the energy terms need, built once per placement.
struct EnergyContext {
    KinematicDerived k;
    Field<double> m;
    Field<Vec3> grad_m;
    EnergyDerivatives d;

    EnergyContext(const PlacementState& p, const EnergyModel& model)
        : k(compute_kinematics(p)),
          m(fluid_mass_content(k, model.rho_f0)),
          grad_m(grad(m)),
          d(energy_partials(k, m, grad_m, model)) {}
};

double face_sum(const std::vector<double>& w, const std::vector<double>& f) {
    std::vector<double> t(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) t[i] = w[i] * f[i];
    return pairwise_sum(t);
}

}  // namespace

double NodalForces::pair(const Variation& v) const {
    std::vector<double> t(chi.size());
    for (std::size_t n = 0; n < chi.size(); ++n) t[n] = dot(chi[n], v.delta_chi_s[n]) + dot(phi[n], v.delta_phi_f[n]);
    return pairwise_sum(t);
}

std::vector<Face> Loads::active_faces(const Grid& g) const {
    if (g.periodic()) return {};
    if (faces.empty()) return g.faces();
    for (const Face& f : faces)
        if (f.axis < 0 || f.axis > 2 || !g.active(f.axis) || (f.side != -1 && f.side != 1))
            throw InvalidArgument("Loads: face " + f.name() + " is not a boundary face of the grid");
    return faces;
}

Field<Tensor2> delta_strain(const KinematicDerived& k, const Variation& v) {
    const Field<Tensor2> gd = grad(v.delta_chi_s);
    return make_field(k.grid(), [&](std::size_t n) { return sym(dot(transpose(k.F_s[n]), gd[n])); });
}

Field<double> delta_mass(const KinematicDerived& k, const Field<double>& m_f, const Variation& v) {
    const Field<Tensor2> gd = grad(v.delta_phi_f);
    return make_field(k.grid(), [&](std::size_t n) { return m_f[n] * ddot(transpose(k.Phi_inv[n]), gd[n]); });
}

Field<Vec3> map_variation(const KinematicDerived& k, const Variation& v) {
    return make_field(k.grid(), [&](std::size_t n) { return -1.0 * dot(k.F_s[n], dot(k.Phi_inv[n], v.delta_phi_f[n])); });
}

double energy_functional(const PlacementState& p, const EnergyModel& model) {
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, model.rho_f0);
    return integrate(energy_density(k, m, grad(m), model));
}

double first_variation_direct(const PlacementState& p, const EnergyModel& model, const Variation& v) {
    const EnergyContext c(p, model);
    const Field<Tensor2> de = delta_strain(c.k, v);
    const Field<double> dm = delta_mass(c.k, c.m, v);
    const Field<Tensor3> gde = grad(de);
    const Field<Vec3> gdm = grad(dm);
    return integrate(make_field(p.grid(), [&](std::size_t n) {
        return ddot(c.d.dPsi_deps[n], de[n]) + c.d.dPsi_dmf[n] * dm[n] + tdot(c.d.dPsi_dgrad_eps[n], gde[n]) +
               dot(c.d.dPsi_dgrad_mf[n], gdm[n]);
    }));
}

NodalForces energy_gradient(const PlacementState& p, const EnergyModel& model) {
    const EnergyContext c(p, model);
    const Grid& g = p.grid();
    const Field<double> w = weights(g);
    Field<Tensor2> Y = grad_transpose(make_field(g, [&](std::size_t n) { return w[n] * c.d.dPsi_dgrad_eps[n]; }));
    for (std::size_t n = 0; n < g.node_count(); ++n) Y[n] = sym(Y[n] + w[n] * c.d.dPsi_deps[n]);
    Field<double> Z = grad_transpose(make_field(g, [&](std::size_t n) { return w[n] * c.d.dPsi_dgrad_mf[n]; }));
    for (std::size_t n = 0; n < g.node_count(); ++n) Z[n] += w[n] * c.d.dPsi_dmf[n];
    return {grad_transpose(make_field(g, [&](std::size_t n) { return dot(c.k.F_s[n], Y[n]); })),
            grad_transpose(make_field(g, [&](std::size_t n) {
                return (Z[n] * c.m[n]) * transpose(c.k.Phi_inv[n]);
            }))};
}

EulerLagrange euler_lagrange(const PlacementState& p, const EnergyModel& model) {
    const Grid& g = p.grid();
    require_box(g, "euler_lagrange");
    const EnergyContext c(p, model);
    const auto& k = c.k;
    const auto& d = c.d;

    const Field<Tensor2> div_G = div(d.dPsi_dgrad_eps);
    const Field<Tensor2> FT = make_field(g, [&](std::size_t n) { return dot(k.F_s[n], d.dPsi_deps[n] - div_G[n]); });
    const Field<double> Zs = d.dPsi_dmf - div(d.dPsi_dgrad_mf);
    const Field<Vec3> gZ = grad(Zs);
    const Field<Tensor2> mPhiT = make_field(g, [&](std::size_t n) { return c.m[n] * transpose(k.Phi_inv[n]); });

    EulerLagrange out{-1.0 * div(FT), make_field(g, [&](std::size_t n) { return -1.0 * dot(mPhiT[n], gZ[n]); }), {}, {}};

    // F·sym(∂Ψ/∂∇ε · n) and (∂Ψ/∂∇m_f · n) m_f Φ^{-T} for a given normal.
    auto solid_moment = [&](const Vec3& nrm) {
        return make_field(g, [&](std::size_t n) { return dot(k.F_s[n], sym(dot(d.dPsi_dgrad_eps[n], nrm))); });
    };
    auto fluid_moment = [&](const Vec3& nrm) {
        return make_field(g, [&](std::size_t n) { return dot(d.dPsi_dgrad_mf[n], nrm) * mPhiT[n]; });
    };

    for (const Face& f : g.faces()) {
        const Vec3 nrm = f.normal();
        const Field<Tensor2> Bs = solid_moment(nrm), Bf = fluid_moment(nrm);
        const auto divBs = surface_div(Bs, f), divBf = surface_div(Bf, f);
        FaceDensities fd{f, {}, {}, {}, {}};
        const auto nodes = g.face_nodes(f);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t n = nodes[i];
            fd.solid_traction.push_back(dot(FT[n], nrm) - divBs[i]);
            fd.solid_double.push_back(dot(Bs[n], nrm));
            fd.fluid_traction.push_back(Zs[n] * dot(mPhiT[n], nrm) - divBf[i]);
            fd.fluid_double.push_back(dot(Bf[n], nrm));
        }
        out.faces.push_back(std::move(fd));
    }

    // One contribution per adjacent face, each with ν the other face's normal.
    for (const Edge& e : g.edges()) {
        const Vec3 na = e.a.normal(), nb = e.b.normal();
        const auto nodes = g.edge_nodes(e);
        EdgeDensities ed{e, {}, {}};
        for (std::size_t n : nodes) {
            const Tensor2 G_a = sym(dot(d.dPsi_dgrad_eps[n], na));
            const Tensor2 G_b = sym(dot(d.dPsi_dgrad_eps[n], nb));
            ed.solid.push_back(dot(k.F_s[n], dot(G_a, nb) + dot(G_b, na)));
            ed.fluid.push_back(dot(mPhiT[n], dot(d.dPsi_dgrad_mf[n], na) * nb + dot(d.dPsi_dgrad_mf[n], nb) * na));
        }
        out.edges.push_back(std::move(ed));
    }
    return out;
}

VariationResult first_variation_assembled(const PlacementState& p, const EnergyModel& model, const Variation& v) {
    const Grid& g = p.grid();
    const EulerLagrange el = euler_lagrange(p, model);
    VariationResult r;
    r.bulk = integrate(make_field(g, [&](std::size_t n) {
        return dot(el.bulk_solid[n], v.delta_chi_s[n]) + dot(el.bulk_fluid[n], v.delta_phi_f[n]);
    }));
    for (const FaceDensities& fd : el.faces) {
        const auto nodes = g.face_nodes(fd.face);
        const auto dn_chi = normal_derivative(v.delta_chi_s, fd.face);
        const auto dn_phi = normal_derivative(v.delta_phi_f, fd.face);
        std::vector<double> a(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            a[i] = dot(fd.solid_traction[i], v.delta_chi_s[nodes[i]]) + dot(fd.solid_double[i], dn_chi[i]) +
                   dot(fd.fluid_traction[i], v.delta_phi_f[nodes[i]]) + dot(fd.fluid_double[i], dn_phi[i]);
        r.surface += face_sum(g.face_weights(fd.face), a);
    }
    for (const EdgeDensities& ed : el.edges) {
        const auto nodes = g.edge_nodes(ed.edge);
        std::vector<double> a(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            a[i] = dot(ed.solid[i], v.delta_chi_s[nodes[i]]) + dot(ed.fluid[i], v.delta_phi_f[nodes[i]]);
        r.edge += face_sum(g.edge_weights(ed.edge), a);
    }
    r.total = r.bulk + r.surface + r.edge;
    return r;
}

NodalForces external_forces(const PlacementState& p, double rho_f0, const Loads& loads) {
    const Grid& g = p.grid();
    NodalForces out = NodalForces::zero(g);
    const auto faces = loads.active_faces(g);
    if (faces.empty() || (loads.p_ext == 0.0 && loads.mu_ext == 0.0)) return out;
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> m = fluid_mass_content(k, rho_f0);
    for (const Face& f : faces) {
        const Vec3 nrm = f.normal();
        const auto nodes = g.face_nodes(f);
        const auto w = g.face_weights(f);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t n = nodes[i];
            out.chi[n] += (-loads.p_ext * k.J_s[n] * w[i]) * dot(nrm, k.F_inv[n]);
            out.phi[n] += (loads.mu_ext * m[n] * w[i]) * dot(nrm, k.Phi_inv[n]);
        }
    }
    return out;
}

double external_work(const PlacementState& p, double rho_f0, const Loads& loads, const Variation& v) {
    return external_forces(p, rho_f0, loads).pair(v);
}

double dissipation_work(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V,
                        const Variation& v) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    // Φ^{-T}·F^T·a paired with δφ equals a·(F·Φ^{-1}·δφ).
    const Field<Vec3> r = make_field(g, [&](std::size_t n) { return dot(k.F_s[n], dot(k.Phi_inv[n], v.delta_phi_f[n])); });
    const Field<Tensor2> gV = grad(V);
    const Field<Tensor2> B = make_field(g, [&](std::size_t n) {
        return k.J_s[n] * dot(dot(diss.A_brink(), gV[n]), k.C_inv[n]);
    });
    const Field<Vec3> divB = div(B);
    double total = integrate(make_field(g, [&](std::size_t n) {
        return k.J_s[n] * dot(dot(diss.D(), V[n]), r[n]) - dot(divB[n], r[n]);
    }));
    if (!g.periodic())
        for (const Face& f : g.faces()) {
            const Vec3 nrm = f.normal();
            const auto nodes = g.face_nodes(f);
            std::vector<double> a(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) a[i] = dot(dot(B[nodes[i]], nrm), r[nodes[i]]);
            total += face_sum(g.face_weights(f), a);
        }
    return total;
}

double dissipation_work_eulerian(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V,
                                 const Variation& v) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    const Field<Vec3> r = map_variation(k, v);
    const Field<Tensor2> gV = grad(V), gr = grad(r);
    return integrate(make_field(g, [&](std::size_t n) {
        const Tensor2 L = dot(dot(diss.A_brink(), gV[n]), k.F_inv[n]);
        return -k.J_s[n] * (dot(dot(diss.D(), V[n]), r[n]) + ddot(L, dot(gr[n], k.F_inv[n])));
    }));
}

NodalForces dissipation_forces(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    const Field<double> w = weights(g);
    const Field<Tensor2> gV = grad(V);
    // Brinkman: −Σ B:∇r with B = w J A·∇V·C^{-1}, so the coefficient of r is −∇^T B.
    const Field<Vec3> brink = grad_transpose(make_field(g, [&](std::size_t n) {
        return (w[n] * k.J_s[n]) * dot(dot(diss.A_brink(), gV[n]), k.C_inv[n]);
    }));
    NodalForces out = NodalForces::zero(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        // r = −F·Φ^{-1}·δφ: the coefficient a of r becomes −Φ^{-T}·F^T·a on δφ.
        const Vec3 a = (-w[n] * k.J_s[n]) * dot(diss.D(), V[n]) - brink[n];
        out.phi[n] = -1.0 * dot(transpose(k.Phi_inv[n]), dot(transpose(k.F_s[n]), a));
    }
    return out;
}

double virtual_work_residual(const PlacementState& p, const EnergyModel& model, const DissipationModel& diss,
                             const Loads& loads, const RelativeVelocity& V, const Variation& v) {
    return first_variation_direct(p, model, v) - external_work(p, model.rho_f0, loads, v) -
           dissipation_work_eulerian(p, diss, V, v);
}

}  // namespace sgporo
