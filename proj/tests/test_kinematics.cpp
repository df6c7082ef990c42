#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sgporo/kinematics.hpp"
#include "sgporo/sampling.hpp"

using namespace sgporo;

namespace {

Field<Vec3> affine(const Grid& g, const Tensor2& A) {
    return make_field(g, [&](std::size_t n) { return dot(A, g.position(n)); });
}

}  // namespace

TEST(Kinematics, IdentityMaps) {
    const Grid g = Grid::cube(5, 1.0, BoundaryMode::box);
    const auto k = compute_kinematics(PlacementState::identity(g));
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_LT(norm(k.F_s[n] - Tensor2::identity()), 1e-14);
        EXPECT_LT(norm(k.Phi_f[n] - Tensor2::identity()), 1e-14);
        EXPECT_LT(norm(k.F_f[n] - Tensor2::identity()), 1e-14);
        EXPECT_LT(norm(k.epsilon[n]), 1e-14);
        EXPECT_LT(norm(k.grad_epsilon[n]), 1e-14);
        EXPECT_NEAR(k.J_s[n], 1.0, 1e-14);
        EXPECT_NEAR(k.J_f[n], 1.0, 1e-14);
    }
}

TEST(Kinematics, UniformDilation) {
    const Grid g = Grid::cube(5, 1.0, BoundaryMode::box);
    const PlacementState p{affine(g, 1.1 * Tensor2::identity()), positions(g)};
    const auto k = compute_kinematics(p);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_LT(norm(k.epsilon[n] - 0.105 * Tensor2::identity()), 1e-13);
        EXPECT_NEAR(k.J_s[n], 1.331, 1e-13);
        EXPECT_LT(norm(k.F_f[n] - 1.1 * Tensor2::identity()), 1e-13);
    }
}

TEST(Kinematics, RigidRotationIsStrainFree) {
    Sampler s(7);
    const Tensor2 Q = s.rotation();
    const Grid g = Grid::cube(6, 2.0, BoundaryMode::box);
    const auto k = compute_kinematics({affine(g, Q), positions(g)});
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_LT(norm(k.epsilon[n]), 1e-13);
        EXPECT_NEAR(k.J_s[n], 1.0, 1e-13);
    }
}

TEST(Kinematics, AffinePlacementsGiveConstantFields) {
    Sampler s(9);
    const Tensor2 A = Tensor2::identity() + s.tensor2(0.2);
    const Tensor2 B = Tensor2::identity() + s.tensor2(0.2);
    const Grid g({5, 6, 7}, {0.2, 0.3, 0.1}, BoundaryMode::box);
    const auto k = compute_kinematics({affine(g, A), affine(g, B)});
    const Tensor2 E = 0.5 * (dot(transpose(A), A) - Tensor2::identity());
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_LT(norm(k.epsilon[n] - E), 1e-12);
        EXPECT_LT(norm(k.F_f[n] - dot(A, inverse(B))), 1e-12);
        EXPECT_LT(norm(k.grad_epsilon[n]), 1e-11);
    }
}

TEST(Kinematics, StructuralInvariantsOnSmoothState) {
    Sampler s(13);
    const Grid g = Grid::cube(10, 1.0, BoundaryMode::box);
    const PlacementState p{perturbed_identity(g, s, 0.01), perturbed_identity(g, s, 0.01)};
    const auto k = compute_kinematics(p);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_EQ(norm(k.epsilon[n] - transpose(k.epsilon[n])), 0.0);
        EXPECT_NEAR(k.J_f[n] * k.det_Phi_f[n], k.J_s[n], 1e-12 * k.J_s[n]);
        EXPECT_LT(norm(dot(k.F_f[n], k.Phi_f[n]) - k.F_s[n]), 1e-13);
    }
}

TEST(Kinematics, SingularPlacementReportsNode) {
    const Grid g = Grid::column(16, 1.0);
    const Field<Vec3> fold = make_field(g, [&](std::size_t n) {
        const double x = g.position(n)[0];
        return Vec3{{x - 1.6 * std::sin(2 * std::numbers::pi * x) / (2 * std::numbers::pi), 0.0, 0.0}};
    });
    try {
        compute_kinematics({fold, positions(g)});
        FAIL() << "expected SingularConfiguration";
    } catch (const SingularConfiguration& e) {
        EXPECT_NE(e.node(), SingularConfiguration::npos);
    }
    const auto report = check_diffeomorphism({fold, positions(g)});
    EXPECT_FALSE(report.ok());
    EXPECT_LT(report.min_det_chi, 0.0);
}

TEST(Diffeomorphism, IdentityAndContraction) {
    const Grid g = Grid::cube(4, 1.0, BoundaryMode::box);
    auto r = check_diffeomorphism(PlacementState::identity(g));
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.min_det_chi, 1.0, 1e-14);
    EXPECT_NEAR(r.min_det_phi, 1.0, 1e-14);
    r = check_diffeomorphism({affine(g, 0.5 * Tensor2::identity()), positions(g)});
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.min_det_chi, 0.125, 1e-14);
}

TEST(Nanson, IdentityAndDilation) {
    const Vec3 n0{{0.0, 0.6, 0.8}};
    auto r = nanson_transport(Tensor2::identity(), 1.0, n0, 2.0);
    EXPECT_LT(norm(r.n - n0), 1e-15);
    EXPECT_DOUBLE_EQ(r.dS, 2.0);
    const double lam = 1.7;
    r = nanson_transport(lam * Tensor2::identity(), lam * lam * lam, n0, 2.0);
    EXPECT_LT(norm(r.n - n0), 1e-15);
    EXPECT_NEAR(r.dS, lam * lam * 2.0, 1e-14);
    EXPECT_THROW(nanson_transport(Tensor2{}, 1.0, n0, 1.0), SingularConfiguration);
    EXPECT_DOUBLE_EQ(volume_transport(1.331, 2.0), 2.662);
}

TEST(Nanson, ClosedSurfaceIntegralVanishes) {
    // Σ over faces of J F^{-T}·n dS → 0.
    std::vector<double> e;
    for (int n : {16, 32, 64}) {
        Sampler s(19);
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::box);
        const auto k = compute_kinematics({perturbed_identity(g, s, 0.01), positions(g)});
        Vec3 total;
        for (const Face& f : g.faces()) {
            const auto nodes = g.face_nodes(f);
            const auto w = g.face_weights(f);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const auto se = nanson_transport(k.F_s[nodes[i]], k.J_s[nodes[i]], f.normal(), w[i]);
                total += se.dS * se.n;
            }
        }
        e.push_back(norm(total));
    }
    // The compatible face weights make the discrete closed-surface integral
    // of the area vector vanish to roundoff, which is stronger than O(h²).
    for (double v : e) EXPECT_LT(v, 1e-12);
}
