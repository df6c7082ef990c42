#pragma once

// Mass measures, Lagrangian flux and continuity residuals.
//
// Fluid velocities are stored as V_f∘φ_f, i.e. the Lagrangian velocity of
// the fluid particle that currently shares the point χ_s(X); with this
// convention v_f - v_s at χ_s(X) is simply V_f[X] - V_s[X].

#include "sgporo/kinematics.hpp"

namespace sgporo {

struct MixtureState {
    double rho_s0 = 1.0;
    double rho_f0 = 1.0;
    Field<double> m_f;
    Field<Vec3> M;
    Field<Vec3> V_s;
    Field<Vec3> V_f;
};

// m_f = ρ_f⁰ det ∇φ_f, cross-checked against J_s J_f^{-1} ρ_f⁰.
// Throws InternalConsistency if the routes differ by more than 1e-10 relative.
Field<double> fluid_mass_content(const KinematicDerived& k, double rho_f0);

// M = m_f F_s^{-1}·(v_f - v_s).
Field<Vec3> lagrangian_flux(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& V_s,
                            const Field<Vec3>& V_f);

// J_s (div w)∘χ_s computed in the current configuration: w = ρ_f (v_f - v_s)
// differentiated with the chain rule ∇_x = ∇_s F_s^{-1}.
Field<double> eulerian_flux_divergence(const KinematicDerived& k, const Field<double>& m_f,
                                       const Field<Vec3>& V_s, const Field<Vec3>& V_f);

struct ContinuityResiduals {
    Field<double> lagrangian;  // dm_f/dt + div_s M
    Field<double> eulerian;    // J_s (d^sρ_f/dt + ρ_f div v_s + div w)
};

ContinuityResiduals continuity_residuals(const MixtureState& state, const KinematicDerived& k,
                                         const Field<double>& dm_f_dt);

// Lagrangian gradient of the relative velocity, ∇_s(F_s·M/m_f), assembled as
//   (1/m_f){[(∇_s F_s)^T·M]^T + F_s·∇_s M} + F_s·[M ⊗ ∇_s(1/m_f)]
// with (∇_s F)_iJK = ∂F_iJ/∂X_K and the third-order transpose (t^T)_kij = t_ijk,
// so [(∇_s F)^T·M]^T_iK = ∂_K F_iJ M_J. Its Eulerian counterpart is this
// tensor times F_s^{-1}.
// Throws DegenerateMass if m_f < 1e-12 ρ_f⁰ anywhere.
Field<Tensor2> relative_velocity_gradient(const KinematicDerived& k, const Field<double>& m_f,
                                          const Field<Vec3>& M, double rho_f0);

void require_positive_mass(const Field<double>& m_f, double rho_f0, const char* what);

}  // namespace sgporo
