#include "sgporo/diff_ops.hpp"

namespace sgporo {

SurfaceOps surface_ops(const Field<Vec3>& f, const Face& face) {
    return {surface_div(f, face), surface_grad(f, face), normal_derivative(f, face)};
}

Field<Tensor2> placement_gradient(const Field<Vec3>& placement) {
    const Grid& g = placement.grid();
    Field<Vec3> u = placement;
    for (std::size_t n = 0; n < g.node_count(); ++n) u[n] -= g.position(n);
    Field<Tensor2> F = grad(u);
    for (auto& t : F.values()) t += Tensor2::identity();
    return F;
}

Field<Vec3> piola_residual(const Field<Vec3>& phi) {
    const Field<Tensor2> G = placement_gradient(phi);
    Field<Tensor2> cof(phi.grid());
    for (std::size_t n = 0; n < G.size(); ++n) {
        if (det(G[n]) <= kSingularDet) throw SingularConfiguration("piola_residual: det grad(phi) <= 1e-12", n);
        cof[n] = cofactor(G[n]);
    }
    return div(cof);
}

}  // namespace sgporo
