#pragma once

// First variations of the discrete energy functional, the external and
// dissipative virtual works, and their nodal (adjoint) forms.
//
// The discrete functional is 𝒜 = Σ_n w_n Ψ_n with every field built from the
// nodal placements by the grid operators. Its exact derivative is available
// in two shapes: first_variation_direct (a bilinear form in the variation)
// and energy_gradient (nodal coefficients, via the transposed operators).

#include <vector>

#include "sgporo/constitutive.hpp"
#include "sgporo/kinematics.hpp"
#include "sgporo/mixture.hpp"

namespace sgporo {

struct Variation {
    Field<Vec3> delta_chi_s;
    Field<Vec3> delta_phi_f;

    static Variation zero(const Grid& g) { return {Field<Vec3>(g), Field<Vec3>(g)}; }
    const Grid& grid() const { return delta_chi_s.grid(); }
};

struct VariationResult {
    double bulk = 0.0;
    double surface = 0.0;
    double edge = 0.0;
    double total = 0.0;
};

// Generalized nodal forces: the pairing with a variation is Σ_n (chi·δχ_s + phi·δφ_f).
struct NodalForces {
    Field<Vec3> chi;
    Field<Vec3> phi;

    static NodalForces zero(const Grid& g) { return {Field<Vec3>(g), Field<Vec3>(g)}; }
    double pair(const Variation& v) const;
};

// Boundary loads: constant external pressure and fluid chemical potential on
// the listed faces (all boundary faces if empty).
struct Loads {
    double p_ext = 0.0;
    double mu_ext = 0.0;
    std::vector<Face> faces;

    std::vector<Face> active_faces(const Grid& g) const;
};

// Relative velocity V_f∘φ_f − V_s on the solid grid.
using RelativeVelocity = Field<Vec3>;

// δε = sym(F_s^T·∇_s δχ_s)
Field<Tensor2> delta_strain(const KinematicDerived& k, const Variation& v);
// δm_f = m_f Φ_f^{-T} : ∇_s δφ_f
Field<double> delta_mass(const KinematicDerived& k, const Field<double>& m_f, const Variation& v);
// δχ_f∘φ_f − δχ_s = −F_s·Φ_f^{-1}·δφ_f
Field<Vec3> map_variation(const KinematicDerived& k, const Variation& v);

double energy_functional(const PlacementState& p, const EnergyModel& model);
double first_variation_direct(const PlacementState& p, const EnergyModel& model, const Variation& v);
NodalForces energy_gradient(const PlacementState& p, const EnergyModel& model);

// Strong-form (integrated-by-parts) densities of δ𝒜.
struct FaceDensities {
    Face face;
    std::vector<Vec3> solid_traction;  // works on δχ_s
    std::vector<Vec3> solid_double;    // works on ∂δχ_s/∂n
    std::vector<Vec3> fluid_traction;  // works on δφ_f
    std::vector<Vec3> fluid_double;    // works on ∂δφ_f/∂n
};

struct EdgeDensities {
    Edge edge;
    std::vector<Vec3> solid;
    std::vector<Vec3> fluid;
};

struct EulerLagrange {
    Field<Vec3> bulk_solid;  // −div_s[F_s·(∂Ψ/∂ε − div_s ∂Ψ/∂∇ε)]
    Field<Vec3> bulk_fluid;  // −Φ_f^{-T}·m_f ∇_s(∂Ψ/∂m_f − div_s ∂Ψ/∂∇m_f)
    std::vector<FaceDensities> faces;
    std::vector<EdgeDensities> edges;
};

// Throws UnsupportedOperation on periodic grids.
EulerLagrange euler_lagrange(const PlacementState& p, const EnergyModel& model);
VariationResult first_variation_assembled(const PlacementState& p, const EnergyModel& model, const Variation& v);

// Boundary pressure and chemical-potential work on the reference configuration.
double external_work(const PlacementState& p, double rho_f0, const Loads& loads, const Variation& v);
NodalForces external_forces(const PlacementState& p, double rho_f0, const Loads& loads);

// Darcy bulk term, Brinkman bulk term with div_s(J A·∇_s V·C^{-1}) and the
// Brinkman boundary term.
double dissipation_work(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V,
                        const Variation& v);
// Current-configuration form pulled back without integration by parts:
//   −∫ J D V·r − ∫ J (A·∇_s V·F^{-1}) : (∇_s r·F^{-1}),  r = map_variation(v).
double dissipation_work_eulerian(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V,
                                 const Variation& v);
// Nodal form of dissipation_work_eulerian.
NodalForces dissipation_forces(const PlacementState& p, const DissipationModel& diss, const RelativeVelocity& V);

// δ𝒜 − δL^ext − δL^diss, with every term in the same discrete form as the
// nodal residual used by the solver.
double virtual_work_residual(const PlacementState& p, const EnergyModel& model, const DissipationModel& diss,
                             const Loads& loads, const RelativeVelocity& V, const Variation& v);

}  // namespace sgporo
