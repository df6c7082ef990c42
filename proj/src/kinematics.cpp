#include "sgporo/kinematics.hpp"

#include <algorithm>
#include <limits>

namespace sgporo {

KinematicDerived compute_kinematics(const PlacementState& p) {
    const Grid& g = p.grid();
    if (!(p.phi_f.grid() == g)) throw InvalidArgument("compute_kinematics: placements live on different grids");
    KinematicDerived k{placement_gradient(p.chi_s),
                       placement_gradient(p.phi_f),
                       Field<Tensor2>(g),
                       Field<Tensor2>(g),
                       Field<Tensor2>(g),
                       Field<Tensor3>(g),
                       Field<double>(g),
                       Field<double>(g),
                       Field<double>(g),
                       Field<Tensor2>(g),
                       Field<Tensor2>(g),
                       Field<Tensor2>(g)};
    const Tensor2 I = Tensor2::identity();
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Tensor2& F = k.F_s[n];
        const Tensor2& Phi = k.Phi_f[n];
        const double J = det(F), dPhi = det(Phi);
        if (!(J > kSingularDet)) throw SingularConfiguration("compute_kinematics: det F_s <= 1e-12", n);
        if (!(dPhi > kSingularDet)) throw SingularConfiguration("compute_kinematics: det Phi_f <= 1e-12", n);
        k.F_inv[n] = inverse(F);
        k.Phi_inv[n] = inverse(Phi);
        k.F_f[n] = dot(F, k.Phi_inv[n]);
        k.C[n] = dot(transpose(F), F);
        k.C_inv[n] = dot(k.F_inv[n], transpose(k.F_inv[n]));
        k.epsilon[n] = 0.5 * (k.C[n] - I);
        k.J_s[n] = J;
        k.det_Phi_f[n] = dPhi;
        k.J_f[n] = J / dPhi;
    }
    k.grad_epsilon = grad(k.epsilon);
    return k;
}

SurfaceElement nanson_transport(const Tensor2& F, double J, const Vec3& n_ref, double dS_ref) {
    if (!(std::abs(det(F)) > kSingularDet)) throw SingularConfiguration("nanson_transport: singular F");
    if (!(J > 0.0)) throw InvalidArgument("nanson_transport: J must be positive");
    const Vec3 a = (J * dS_ref) * dot(transpose(inverse(F)), n_ref);
    const double dS = norm(a);
    return {a / dS, dS};
}

DiffeomorphismReport check_diffeomorphism(const PlacementState& p) {
    const Field<Tensor2> F = placement_gradient(p.chi_s);
    const Field<Tensor2> Phi = placement_gradient(p.phi_f);
    DiffeomorphismReport r;
    r.min_det_chi = r.min_det_phi = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < F.size(); ++n) {
        const double a = det(F[n]), b = det(Phi[n]);
        r.min_det_chi = std::min(r.min_det_chi, a);
        r.min_det_phi = std::min(r.min_det_phi, b);
        if (!(a > kSingularDet) || !(b > kSingularDet)) r.violating_nodes.push_back(n);
    }
    return r;
}

}  // namespace sgporo
