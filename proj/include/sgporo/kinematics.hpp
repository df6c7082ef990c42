#pragma once

// Deformation measures of the two-placement description: the solid placement
// χ_s and the fluid identification map φ_f, both fields over the solid
// reference grid.

#include <cstddef>
#include <vector>

#include "sgporo/diff_ops.hpp"
#include "sgporo/grid.hpp"

namespace sgporo {

struct PlacementState {
    Field<Vec3> chi_s;  // current position of solid particles
    Field<Vec3> phi_f;  // fluid reference particle at the same current point

    static PlacementState identity(const Grid& g) { return {positions(g), positions(g)}; }
    const Grid& grid() const { return chi_s.grid(); }
};

struct KinematicDerived {
    Field<Tensor2> F_s;
    Field<Tensor2> Phi_f;
    Field<Tensor2> F_f;  // F_s·Φ_f^{-1}
    Field<Tensor2> C;
    Field<Tensor2> epsilon;
    Field<Tensor3> grad_epsilon;
    Field<double> J_s;
    Field<double> J_f;  // J_s / det Φ_f
    Field<double> det_Phi_f;
    // Cached inverses used throughout the variational and governing modules.
    Field<Tensor2> F_inv;
    Field<Tensor2> Phi_inv;
    Field<Tensor2> C_inv;

    const Grid& grid() const { return F_s.grid(); }
};

// Throws SingularConfiguration (with node index) if det F_s or det Φ_f ≤ 1e-12.
KinematicDerived compute_kinematics(const PlacementState& p);

struct SurfaceElement {
    Vec3 n;     // unit normal
    double dS;  // area
};

// n dS = J F^{-T}·n_ref dS_ref.
SurfaceElement nanson_transport(const Tensor2& F, double J, const Vec3& n_ref, double dS_ref);
// dB_t = J dB_ref.
inline double volume_transport(double J, double dV_ref) { return J * dV_ref; }

struct DiffeomorphismReport {
    double min_det_chi = 0.0;
    double min_det_phi = 0.0;
    std::vector<std::size_t> violating_nodes;

    bool ok() const { return violating_nodes.empty(); }
};

DiffeomorphismReport check_diffeomorphism(const PlacementState& p);

}  // namespace sgporo
