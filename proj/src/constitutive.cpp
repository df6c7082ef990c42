#include "sgporo/constitutive.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sgporo {

void EnergyModel::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(lambda) || !finite(G) || !finite(M_b) || !finite(b) || !finite(kappa_s) || !finite(kappa_f) ||
        !finite(rho_f0))
        throw InvalidArgument("EnergyModel: parameters must be finite");
    if (!(lambda + 2.0 / 3.0 * G > 0.0)) throw InvalidArgument("EnergyModel: lambda + 2G/3 must be positive");
    if (!(G > 0.0)) throw InvalidArgument("EnergyModel: G must be positive");
    if (!(M_b > 0.0)) throw InvalidArgument("EnergyModel: M_b must be positive");
    if (!(kappa_s >= 0.0) || !(kappa_f >= 0.0)) throw InvalidArgument("EnergyModel: gradient moduli must be >= 0");
    if (!(rho_f0 > 0.0)) throw InvalidArgument("EnergyModel: rho_f0 must be positive");
}

double energy_density_point(const EnergyModel& m, const Tensor2& eps, double m_f, const Tensor3& grad_eps,
                            const Vec3& grad_mf) {
    const double tr = trace(eps);
    const Vec3 gtr = trace12(grad_eps);
    const double zeta = m_f / m.rho_f0 - 1.0 - m.b * tr;
    return 0.5 * m.lambda * tr * tr + m.G * ddot(eps, eps) + 0.5 * m.M_b * zeta * zeta +
           0.5 * m.kappa_s * dot(gtr, gtr) + 0.5 * m.kappa_f * dot(grad_mf, grad_mf) / (m.rho_f0 * m.rho_f0);
}

PointPartials energy_partials_point(const EnergyModel& m, const Tensor2& eps, double m_f, const Tensor3& grad_eps,
                                    const Vec3& grad_mf) {
    const double tr = trace(eps);
    const double zeta = m_f / m.rho_f0 - 1.0 - m.b * tr;
    PointPartials p;
    p.dPsi_deps = (m.lambda * tr - m.M_b * m.b * zeta) * Tensor2::identity() + (2.0 * m.G) * eps;
    p.dPsi_dmf = m.M_b * zeta / m.rho_f0;
    p.dPsi_dgrad_eps = outer(Tensor2::identity(), m.kappa_s * trace12(grad_eps));
    p.dPsi_dgrad_mf = (m.kappa_f / (m.rho_f0 * m.rho_f0)) * grad_mf;
    return p;
}

Field<double> energy_density(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& grad_mf,
                             const EnergyModel& model) {
    return make_field(k.grid(), [&](std::size_t n) {
        return energy_density_point(model, k.epsilon[n], m_f[n], k.grad_epsilon[n], grad_mf[n]);
    });
}

EnergyDerivatives energy_partials(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& grad_mf,
                                  const EnergyModel& model) {
    const Grid& g = k.grid();
    EnergyDerivatives d{Field<Tensor2>(g), Field<double>(g), Field<Tensor3>(g), Field<Vec3>(g), model.rho_f0};
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const auto p = energy_partials_point(model, k.epsilon[n], m_f[n], k.grad_epsilon[n], grad_mf[n]);
        d.dPsi_deps[n] = p.dPsi_deps;
        d.dPsi_dmf[n] = p.dPsi_dmf;
        d.dPsi_dgrad_eps[n] = p.dPsi_dgrad_eps;
        d.dPsi_dgrad_mf[n] = p.dPsi_dgrad_mf;
    }
    return d;
}

std::pair<Tensor2, Vec3> push_forward(const Tensor2& F, const Tensor2& S, const Vec3& gamma) {
    const double J = det(F);
    return {dot(dot(F, S), transpose(F)) / J, dot(F, gamma) / J};
}

std::pair<Tensor2, Vec3> pull_back(const Tensor2& F, const Tensor2& sigma, const Vec3& c) {
    const double J = det(F);
    const Tensor2 Fi = inverse(F);
    return {J * dot(dot(Fi, sigma), transpose(Fi)), J * dot(Fi, c)};
}

Field<double> chemical_potential(const KinematicDerived& k, const EnergyDerivatives& derivs,
                                 const Field<double>& m_f, const Field<Vec3>& gamma_f) {
    require_positive_mass(m_f, derivs.rho_f0, "chemical_potential");
    const Grid& g = k.grid();
    const Field<Vec3> g_inv_m = grad(make_field(g, [&](std::size_t n) { return 1.0 / m_f[n]; }));
    const Field<Vec3> gJ = grad(k.J_s);
    return make_field(g, [&](std::size_t n) {
        return derivs.dPsi_dmf[n] + (4.0 / 3.0) * dot(gamma_f[n], g_inv_m[n]) +
               dot(gamma_f[n], gJ[n]) / (3.0 * k.J_s[n] * m_f[n]);
    });
}

StressState recover_stresses(const KinematicDerived& k, const EnergyDerivatives& derivs, const Field<double>& m_f) {
    const Grid& g = k.grid();
    StressState s{Field<Tensor2>(g), Field<Vec3>(g),    Field<Vec3>(g), Field<Tensor2>(g), Field<Tensor2>(g),
                  Field<Vec3>(g),    Field<Vec3>(g),    Field<double>(g), Field<double>(g)};
    const Field<Tensor3> gC = grad(k.C);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Tensor2& Ci = k.C_inv[n];
        s.gamma[n] = ddot(k.C[n], derivs.dPsi_dgrad_eps[n]) / 3.0;
        s.compatibility_residual[n] = norm(derivs.dPsi_dgrad_eps[n] - outer(Ci, s.gamma[n]));
        s.S[n] = derivs.dPsi_deps[n] + dot(dot(Ci, dot(gC[n], s.gamma[n])), Ci);
        s.gamma_f[n] = -m_f[n] * derivs.dPsi_dgrad_mf[n];
    }
    s.g_f = chemical_potential(k, derivs, m_f, s.gamma_f);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        s.S_f[n] = (-m_f[n] * s.g_f[n]) * k.C_inv[n];
        std::tie(s.sigma[n], s.hyper_c[n]) = push_forward(k.F_s[n], s.S[n], s.gamma[n]);
        s.hyper_c_f[n] = dot(k.F_s[n], s.gamma_f[n]) / k.J_s[n];
    }
    return s;
}

SolidDissipation solid_dissipation_residual(const KinematicDerived& k, const Field<double>& m_f,
                                            const StrainRates& rates, const EnergyModel& model) {
    const Grid& g = k.grid();
    const Field<Vec3> gm = grad(m_f);
    const EnergyDerivatives d = energy_partials(k, m_f, gm, model);
    const StressState st = recover_stresses(k, d, m_f);
    const Field<Tensor3> gC = grad(k.C);
    const Field<Vec3> g_inv_m = grad(make_field(g, [&](std::size_t n) { return 1.0 / m_f[n]; }));
    const Field<Vec3> gJ = grad(k.J_s);
    const Field<Vec3> g_m_over_J = grad(make_field(g, [&](std::size_t n) { return m_f[n] / k.J_s[n]; }));
    SolidDissipation r{Field<double>(g), Field<double>(g), Field<double>(g)};
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Tensor2& Ci = k.C_inv[n];
        const double m = m_f[n], J = k.J_s[n];
        const Vec3& gf = st.gamma_f[n];
        const Tensor2 stress_part = st.S[n] - dot(dot(Ci, dot(gC[n], st.gamma[n])), Ci);
        const Tensor2 bracket = outer(J * dot(Ci, g_m_over_J[n]), gf / m);
        const Tensor3 CiG = outer(Ci, st.gamma[n]);
        const double mass_coeff = st.g_f[n] - (4.0 / 3.0) * dot(gf, g_inv_m[n]) - dot(gf, gJ[n]) / (3.0 * J * m);
        const double dpsi_dt = ddot(d.dPsi_deps[n], rates.eps_dot[n]) + d.dPsi_dmf[n] * rates.mf_dot[n] +
                               tdot(d.dPsi_dgrad_eps[n], rates.grad_eps_dot[n]) +
                               dot(d.dPsi_dgrad_mf[n], rates.grad_mf_dot[n]);
        r.residual[n] = ddot(stress_part - bracket, rates.eps_dot[n]) + tdot(CiG, rates.grad_eps_dot[n]) +
                        mass_coeff * rates.mf_dot[n] - dot(gf / m, rates.grad_mf_dot[n]) - dpsi_dt;
        r.discrepancy[n] = -ddot(bracket, rates.eps_dot[n]);
        r.compatibility[n] = tdot(CiG - d.dPsi_dgrad_eps[n], rates.grad_eps_dot[n]);
    }
    return r;
}

namespace {

// tr(∇_s f · F^{-1}): divergence in the current configuration.
Field<double> current_div(const KinematicDerived& k, const Field<Vec3>& f) {
    const Field<Tensor2> gf = grad(f);
    return make_field(k.grid(), [&](std::size_t n) { return trace(dot(gf[n], k.F_inv[n])); });
}

// F^{-T}·∇_s φ: gradient in the current configuration.
Field<Vec3> current_grad(const KinematicDerived& k, const Field<double>& f) {
    const Field<Vec3> gf = grad(f);
    return make_field(k.grid(), [&](std::size_t n) { return dot(gf[n], k.F_inv[n]); });
}

}  // namespace

DeformationPower deformation_power_density(const KinematicDerived& k, const StressState& st,
                                           const Field<double>& m_f, const Field<Vec3>& V_s,
                                           const Field<Vec3>& V_rel) {
    require_positive_mass(m_f, 1e-300, "deformation_power_density");
    const Grid& g = k.grid();
    const Field<Tensor2> gVs = grad(V_s);
    const Field<Tensor2> eps_dot =
        make_field(g, [&](std::size_t n) { return sym(dot(transpose(k.F_s[n]), gVs[n])); });
    const Field<Tensor3> g_eps_dot = grad(eps_dot);
    const Field<Tensor3> gC = grad(k.C);
    const Field<Vec3> M = make_field(g, [&](std::size_t n) { return m_f[n] * dot(k.F_inv[n], V_rel[n]); });
    const Field<Vec3> M_over_m = make_field(g, [&](std::size_t n) { return M[n] / m_f[n]; });

    // Reference-configuration form.
    const Field<double> t3 = div(make_field(
        g, [&](std::size_t n) { return dot(transpose(st.S_f[n]), dot(k.C[n], M_over_m[n])); }));
    const Field<Vec3> g_div_Mm = grad(div(M_over_m));
    const Field<Vec3> g_div_gf = grad(div(st.gamma_f));
    const Field<Vec3> gJ = grad(k.J_s);
    const Field<double> t6 = div(make_field(g, [&](std::size_t n) {
        return (dot(M_over_m[n], gJ[n]) / k.J_s[n]) * st.gamma_f[n];
    }));
    DeformationPower out{Field<double>(g), Field<double>(g), 0.0, 0.0};
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Tensor2& Ci = k.C_inv[n];
        const Tensor2 A = st.S[n] - dot(dot(Ci, dot(gC[n], st.gamma[n])), Ci);
        out.lagrangian[n] = ddot(A, eps_dot[n]) + tdot(outer(Ci, st.gamma[n]), g_eps_dot[n]) + t3[n] +
                            dot(g_div_Mm[n], st.gamma_f[n]) - dot(M_over_m[n], g_div_gf[n]) + t6[n];
    }

    // Current-configuration form, weighted by J_s.
    const Field<double> div_v = current_div(k, V_s);
    const Field<double> div_w = current_div(k, V_rel);
    const Field<double> div_cf = current_div(k, st.hyper_c_f);
    const Field<double> div_sf = current_div(k, make_field(g, [&](std::size_t n) {
        const Tensor2 sigma_f = dot(dot(k.F_s[n], st.S_f[n]), transpose(k.F_s[n])) / k.J_s[n];
        return dot(transpose(sigma_f), V_rel[n]);
    }));
    const Field<Vec3> g_div_v = current_grad(k, div_v);
    const Field<Vec3> g_div_w = current_grad(k, div_w);
    const Field<Vec3> g_div_cf = current_grad(k, div_cf);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Tensor2 L = dot(gVs[n], k.F_inv[n]);
        out.eulerian[n] = k.J_s[n] * (ddot(st.sigma[n], L) + div_sf[n] + dot(st.hyper_c[n], g_div_v[n]) +
                                      dot(st.hyper_c_f[n], g_div_w[n]) - dot(g_div_cf[n], V_rel[n]));
    }
    out.lagrangian_integral = integrate(out.lagrangian);
    out.eulerian_integral = integrate(out.eulerian);
    return out;
}

DissipationModel::DissipationModel(const Tensor2& D, const Tensor2& A_brink) : D_(D), A_(A_brink) {
    auto check = [](const Tensor2& T, bool strict, const char* name) {
        if (!all_finite(T)) throw InvalidArgument(std::string(name) + " must be finite");
        if (norm(T - transpose(T)) > 1e-12 * std::max(1.0, norm(T)))
            throw InvalidArgument(std::string(name) + " must be symmetric");
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = T(i, j);
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues().minCoeff();
        if (strict ? !(lmin > 0.0) : !(lmin >= -1e-14 * std::max(1.0, norm(T))))
            throw InvalidArgument(std::string(name) + (strict ? " must be positive-definite" : " must be positive semi-definite"));
    };
    check(D_, true, "Darcy tensor D");
    check(A_, false, "Brinkman tensor A_brink");
}

Field<double> dissipation_power(const DissipationModel& diss, const Field<Vec3>& v_rel,
                                const Field<Tensor2>& grad_v_rel) {
    return make_field(v_rel.grid(), [&](std::size_t n) {
        return dot(dot(diss.D(), v_rel[n]), v_rel[n]) + ddot(dot(diss.A_brink(), grad_v_rel[n]), grad_v_rel[n]);
    });
}

}  // namespace sgporo
