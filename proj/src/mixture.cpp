#include "sgporo/mixture.hpp"

#include <cmath>
#include <string>

namespace sgporo {

void require_positive_mass(const Field<double>& m_f, double rho_f0, const char* what) {
    for (std::size_t n = 0; n < m_f.size(); ++n)
        if (!(m_f[n] >= 1e-12 * rho_f0))
            throw DegenerateMass(std::string(what) + ": fluid mass content degenerate at node " + std::to_string(n));
}

Field<double> fluid_mass_content(const KinematicDerived& k, double rho_f0) {
    if (!(rho_f0 > 0.0)) throw InvalidArgument("fluid_mass_content: rho_f0 must be positive");
    Field<double> m(k.grid());
    for (std::size_t n = 0; n < m.size(); ++n) {
        m[n] = rho_f0 * k.det_Phi_f[n];
        const double via_jacobians = k.J_s[n] / k.J_f[n] * rho_f0;
        if (std::abs(via_jacobians - m[n]) > 1e-10 * std::abs(m[n]))
            throw InternalConsistency("fluid_mass_content: determinant and Jacobian routes disagree at node " +
                                      std::to_string(n));
    }
    return m;
}

Field<Vec3> lagrangian_flux(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& V_s,
                            const Field<Vec3>& V_f) {
    return make_field(k.grid(), [&](std::size_t n) { return m_f[n] * dot(k.F_inv[n], V_f[n] - V_s[n]); });
}

Field<double> eulerian_flux_divergence(const KinematicDerived& k, const Field<double>& m_f,
                                       const Field<Vec3>& V_s, const Field<Vec3>& V_f) {
    const Field<Vec3> w = make_field(k.grid(), [&](std::size_t n) { return (m_f[n] / k.J_s[n]) * (V_f[n] - V_s[n]); });
    const Field<Tensor2> gw = grad(w);
    return make_field(k.grid(), [&](std::size_t n) { return k.J_s[n] * trace(dot(gw[n], k.F_inv[n])); });
}

ContinuityResiduals continuity_residuals(const MixtureState& state, const KinematicDerived& k,
                                         const Field<double>& dm_f_dt) {
    const Grid& g = k.grid();
    const Field<double> divM = div(state.M);
    const Field<Tensor2> gVs = grad(state.V_s);
    const Field<double> Jdivw = eulerian_flux_divergence(k, state.m_f, state.V_s, state.V_f);
    ContinuityResiduals r{Field<double>(g), Field<double>(g)};
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        r.lagrangian[n] = dm_f_dt[n] + divM[n];
        const double J = k.J_s[n];
        const double rho = state.m_f[n] / J;
        const double div_vs = trace(dot(gVs[n], k.F_inv[n]));
        const double Jdot = J * div_vs;
        const double drho_dt = dm_f_dt[n] / J - state.m_f[n] * Jdot / (J * J);
        r.eulerian[n] = J * (drho_dt + rho * div_vs) + Jdivw[n];
    }
    return r;
}

Field<Tensor2> relative_velocity_gradient(const KinematicDerived& k, const Field<double>& m_f,
                                          const Field<Vec3>& M, double rho_f0) {
    require_positive_mass(m_f, rho_f0, "relative_velocity_gradient");
    const Grid& g = k.grid();
    const Field<Tensor3> gF = grad(k.F_s);
    const Field<Tensor2> gM = grad(M);
    const Field<double> inv_m = make_field(g, [&](std::size_t n) { return 1.0 / m_f[n]; });
    const Field<Vec3> g_inv_m = grad(inv_m);
    return make_field(g, [&](std::size_t n) {
        const Tensor2 a = transpose(dot(transpose3(gF[n]), M[n]));
        return (a + dot(k.F_s[n], gM[n])) / m_f[n] + dot(k.F_s[n], outer(M[n], g_inv_m[n]));
    });
}

}  // namespace sgporo
