#pragma once

// Quadratic second-gradient energy, its partials, stress recovery, chemical
// potential, dissipation models and power densities.
//
//   Ψ = ½λ(tr ε)² + G ε:ε + ½M_b(m_f/ρ_f⁰ − 1 − b tr ε)²
//       + ½κ_s|∇_s tr ε|² + ½κ_f|∇_s m_f/ρ_f⁰|²

#include <utility>

#include "sgporo/kinematics.hpp"
#include "sgporo/mixture.hpp"

namespace sgporo {

struct EnergyModel {
    double lambda = 1.0;
    double G = 1.0;
    double M_b = 1.0;
    double b = 1.0;
    double kappa_s = 1e-2;
    double kappa_f = 1e-2;
    double rho_f0 = 1.0;

    // Throws InvalidArgument unless λ + ⅔G > 0, G > 0, M_b > 0, κ ≥ 0, ρ_f⁰ > 0.
    void validate() const;
};

struct PointPartials {
    Tensor2 dPsi_deps;
    double dPsi_dmf = 0.0;
    Tensor3 dPsi_dgrad_eps;
    Vec3 dPsi_dgrad_mf;
};

double energy_density_point(const EnergyModel& model, const Tensor2& eps, double m_f, const Tensor3& grad_eps,
                            const Vec3& grad_mf);
PointPartials energy_partials_point(const EnergyModel& model, const Tensor2& eps, double m_f,
                                    const Tensor3& grad_eps, const Vec3& grad_mf);

struct EnergyDerivatives {
    Field<Tensor2> dPsi_deps;
    Field<double> dPsi_dmf;
    Field<Tensor3> dPsi_dgrad_eps;
    Field<Vec3> dPsi_dgrad_mf;
    double rho_f0 = 1.0;
};

Field<double> energy_density(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& grad_mf,
                             const EnergyModel& model);
EnergyDerivatives energy_partials(const KinematicDerived& k, const Field<double>& m_f, const Field<Vec3>& grad_mf,
                                  const EnergyModel& model);

struct StressState {
    Field<Tensor2> S;
    Field<Vec3> gamma;    // (1/3) C : ∂Ψ/∂∇ε
    Field<Vec3> gamma_f;  // -m_f ∂Ψ/∂∇m_f
    Field<Tensor2> S_f;   // -m_f g_f C^{-1}
    Field<Tensor2> sigma;
    Field<Vec3> hyper_c;    // J^{-1} F·γ
    Field<Vec3> hyper_c_f;  // J^{-1} F·γ_f
    Field<double> g_f;      // chemical potential
    Field<double> compatibility_residual;  // |∂Ψ/∂∇ε − C^{-1}⊗γ| per node
};

StressState recover_stresses(const KinematicDerived& k, const EnergyDerivatives& derivs, const Field<double>& m_f);

// σ = J^{-1} F·S·F^T, c = J^{-1} F·γ and the inverse map.
std::pair<Tensor2, Vec3> push_forward(const Tensor2& F, const Tensor2& S, const Vec3& gamma);
std::pair<Tensor2, Vec3> pull_back(const Tensor2& F, const Tensor2& sigma, const Vec3& c);

// g_f = ∂Ψ/∂m_f + (4/3) γ_f·∇_s(1/m_f) + (J_s^{-1}/(3 m_f)) γ_f·∇_s J_s.
Field<double> chemical_potential(const KinematicDerived& k, const EnergyDerivatives& derivs,
                                 const Field<double>& m_f, const Field<Vec3>& gamma_f);

struct StrainRates {
    Field<Tensor2> eps_dot;
    Field<double> mf_dot;
    Field<Tensor3> grad_eps_dot;
    Field<Vec3> grad_mf_dot;
};

struct SolidDissipation {
    Field<double> residual;     // Φ_s evaluated term by term
    Field<double> discrepancy;  // −([J C^{-1}·∇(J^{-1}m_f)]⊗(γ_f/m_f)) : dε/dt
    Field<double> compatibility;  // (C^{-1}⊗γ − ∂Ψ/∂∇ε) ⋮ ∇(dε/dt)
};

SolidDissipation solid_dissipation_residual(const KinematicDerived& k, const Field<double>& m_f,
                                            const StrainRates& rates, const EnergyModel& model);

struct DeformationPower {
    Field<double> lagrangian;  // per unit reference volume
    Field<double> eulerian;    // J_s × current-configuration density
    double lagrangian_integral = 0.0;
    double eulerian_integral = 0.0;
};

// Deformation power for solid velocity V_s and relative velocity
// V_rel = v_f − v_s (both on the solid grid); M = m_f F^{-1}·V_rel.
DeformationPower deformation_power_density(const KinematicDerived& k, const StressState& stress,
                                           const Field<double>& m_f, const Field<Vec3>& V_s,
                                           const Field<Vec3>& V_rel);

class DissipationModel {
public:
    // Throws InvalidArgument unless D is SPD and A_brink symmetric positive
    // semi-definite.
    DissipationModel(const Tensor2& D, const Tensor2& A_brink);

    const Tensor2& D() const { return D_; }
    const Tensor2& A_brink() const { return A_; }

private:
    Tensor2 D_;
    Tensor2 A_;
};

// (D·v)·v + (A·L):L
Field<double> dissipation_power(const DissipationModel& diss, const Field<Vec3>& v_rel,
                                const Field<Tensor2>& grad_v_rel);

}  // namespace sgporo
