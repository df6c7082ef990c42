#include <gtest/gtest.h>

#include <cmath>

#include "sgporo/diff_ops.hpp"
#include "sgporo/sampling.hpp"
#include "sgporo/variational.hpp"

using namespace sgporo;

namespace {

EnergyModel gradient_model() {
    EnergyModel m;
    m.kappa_s = m.kappa_f = 0.1;
    return m;
}

PlacementState random_state(const Grid& g, Sampler& s, double amp = 0.01) {
    Field<Vec3> chi = perturbed_identity(g, s, amp);
    Field<Vec3> phi = perturbed_identity(g, s, amp);
    return {chi, phi};
}

// Sinusoidal part plus a non-periodic polynomial part.
Variation random_variation(const Grid& g, Sampler& s, double amp = 1.0) {
    Field<Vec3> a = smooth_vector_field(g, s, amp);
    Field<Vec3> b = smooth_vector_field(g, s, amp);
    a += polynomial_vector_field(g, s, amp);
    b += polynomial_vector_field(g, s, amp);
    return {a, b};
}

PlacementState shifted(const PlacementState& p, const Variation& v, double h) {
    PlacementState q = p;
    for (std::size_t n = 0; n < q.chi_s.size(); ++n) {
        q.chi_s[n] += h * v.delta_chi_s[n];
        q.phi_f[n] += h * v.delta_phi_f[n];
    }
    return q;
}

// Smooth bump vanishing with all derivatives outside the ball of radius r.
double bump(const Vec3& x, const Vec3& c, double r) {
    const double q = dot(x - c, x - c) / (r * r);
    return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
}

}  // namespace

TEST(DeltaStrain, ZeroVariation) {
    Sampler s(1);
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    const auto k = compute_kinematics(random_state(g, s));
    EXPECT_EQ(max_abs(delta_strain(k, Variation::zero(g))), 0.0);
}

TEST(DeltaStrain, AffineVariationAtIdentity) {
    Sampler s(2);
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    const auto k = compute_kinematics(PlacementState::identity(g));
    const Tensor2 A = s.tensor2();
    Variation v = Variation::zero(g);
    v.delta_chi_s = make_field(g, [&](std::size_t n) { return dot(A, g.position(n)); });
    const auto de = delta_strain(k, v);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_LT(norm(de[n] - sym(A)), 1e-13);
        EXPECT_EQ(norm(de[n] - transpose(de[n])), 0.0);
    }
}

TEST(DeltaStrain, MatchesFiniteDifferenceOfStrain) {
    Sampler s(3);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const PlacementState p = random_state(g, s, 0.003);
        const Variation v = random_variation(g, s);
        const auto de = delta_strain(compute_kinematics(p), v);
        const auto ep = compute_kinematics(shifted(p, v, h)).epsilon;
        const auto em = compute_kinematics(shifted(p, v, -h)).epsilon;
        double err = 0.0;
        for (std::size_t n = 0; n < g.node_count(); ++n) err = std::max(err, max_abs((ep[n] - em[n]) / (2 * h) - de[n]));
        EXPECT_LT(err / max_abs(de), 1e-6);
    }
}

TEST(DeltaMass, ZeroAndDilation) {
    Sampler s(4);
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    const auto k = compute_kinematics(random_state(g, s));
    const auto m = fluid_mass_content(k, 1.3);
    EXPECT_EQ(max_abs(delta_mass(k, m, Variation::zero(g))), 0.0);

    const auto k0 = compute_kinematics(PlacementState::identity(g));
    const Field<double> m0(g, 1.3);
    Variation v = Variation::zero(g);
    v.delta_phi_f = make_field(g, [&](std::size_t n) { return 0.2 * g.position(n); });
    const auto dm = delta_mass(k0, m0, v);
    for (double x : dm.values()) EXPECT_NEAR(x, 3 * 0.2 * 1.3, 1e-13);
}

TEST(DeltaMass, MatchesFiniteDifferenceOfDeterminant) {
    Sampler s(5);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const double h = 1e-5, rho = 1.7;
    for (int trial = 0; trial < 100; ++trial) {
        const PlacementState p = random_state(g, s, 0.003);
        const Variation v = random_variation(g, s);
        const auto k = compute_kinematics(p);
        const auto dm = delta_mass(k, fluid_mass_content(k, rho), v);
        const auto mp = fluid_mass_content(compute_kinematics(shifted(p, v, h)), rho);
        const auto mm = fluid_mass_content(compute_kinematics(shifted(p, v, -h)), rho);
        double err = 0.0;
        for (std::size_t n = 0; n < g.node_count(); ++n) err = std::max(err, std::abs((mp[n] - mm[n]) / (2 * h) - dm[n]));
        EXPECT_LT(err / max_abs(dm), 1e-6);
    }
}

TEST(MapVariation, SimpleCases) {
    Sampler s(6);
    const Grid g = Grid::cube(5, 1.0, BoundaryMode::box);
    const auto k = compute_kinematics(random_state(g, s));
    EXPECT_EQ(max_abs(map_variation(k, Variation::zero(g))), 0.0);
    const auto k0 = compute_kinematics(PlacementState::identity(g));
    Variation v = Variation::zero(g);
    v.delta_phi_f = smooth_vector_field(g, s, 1.0);
    const auto r = map_variation(k0, v);
    for (std::size_t n = 0; n < g.node_count(); ++n) EXPECT_LT(norm(r[n] + v.delta_phi_f[n]), 1e-15);
}

TEST(MapVariation, ReproducesMassVariationThroughFlux) {
    // δm_f = −div_s(m_f F^{-1}·r) up to the discrete Piola residual.
    std::vector<double> e;
    for (int n : {16, 32, 64}) {
        Sampler s(7);
        const Grid g({n, n, 1}, {1.0 / (n - 1), 1.0 / (n - 1), 1.0}, BoundaryMode::box);
        const PlacementState p = random_state(g, s, 0.02);
        Variation v = Variation::zero(g);
        v.delta_phi_f = smooth_vector_field(g, s, 1.0);
        const auto k = compute_kinematics(p);
        const auto m = fluid_mass_content(k, 1.0);
        const auto r = map_variation(k, v);
        const auto via_flux = div(make_field(g, [&](std::size_t i) { return m[i] * dot(k.F_inv[i], r[i]); }));
        const auto dm = delta_mass(k, m, v);
        e.push_back(max_abs(dm + via_flux));
    }
    EXPECT_GT(std::log2(e[1] / e[2]), 1.8) << e[0] << " " << e[1] << " " << e[2];
}

TEST(FirstVariation, ZeroVariationAndTranslation) {
    Sampler s(8);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const PlacementState p = random_state(g, s);
    EXPECT_EQ(first_variation_direct(p, gradient_model(), Variation::zero(g)), 0.0);
    Variation v = Variation::zero(g);
    v.delta_chi_s = Field<Vec3>(g, Vec3{{0.3, -1.0, 2.0}});
    EXPECT_LT(std::abs(first_variation_direct(p, gradient_model(), v)), 1e-15);
}

TEST(FirstVariation, MatchesFiniteDifferenceOfFunctional) {
    Sampler s(9);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        EnergyModel model = gradient_model();
        model.kappa_s = s.uniform(0.0, 0.2);
        model.kappa_f = s.uniform(0.0, 0.2);
        const PlacementState p = random_state(g, s, 0.01);
        const Variation v = random_variation(g, s, 0.1);
        const double direct = first_variation_direct(p, model, v);
        const double fd = (energy_functional(shifted(p, v, h), model) - energy_functional(shifted(p, v, -h), model)) / (2 * h);
        EXPECT_LT(std::abs(direct - fd) / std::abs(direct), 1e-6) << direct << " vs " << fd;
    }
}

TEST(FirstVariation, NodalGradientIsTheSameLinearForm) {
    Sampler s(10);
    for (BoundaryMode mode : {BoundaryMode::box, BoundaryMode::periodic}) {
        const Grid g = Grid::cube(8, 1.0, mode);
        const PlacementState p = random_state(g, s);
        const NodalForces f = energy_gradient(p, gradient_model());
        for (int trial = 0; trial < 5; ++trial) {
            const Variation v = random_variation(g, s);
            const double direct = first_variation_direct(p, gradient_model(), v);
            EXPECT_NEAR(f.pair(v), direct, 1e-12 * (1.0 + std::abs(direct)));
        }
    }
}

TEST(FirstVariation, VanishesAtUnloadedReference) {
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    const NodalForces f = energy_gradient(PlacementState::identity(g), gradient_model());
    EXPECT_EQ(max_abs(f.chi), 0.0);
    EXPECT_EQ(max_abs(f.phi), 0.0);
}

TEST(Assembled, ZeroVariationAndPeriodicRejection) {
    Sampler s(11);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const auto r = first_variation_assembled(random_state(g, s), gradient_model(), Variation::zero(g));
    EXPECT_EQ(r.bulk, 0.0);
    EXPECT_EQ(r.surface, 0.0);
    EXPECT_EQ(r.edge, 0.0);
    EXPECT_EQ(r.total, 0.0);
    const Grid gp = Grid::cube(8, 1.0, BoundaryMode::periodic);
    EXPECT_THROW(first_variation_assembled(PlacementState::identity(gp), gradient_model(), Variation::zero(gp)),
                 UnsupportedOperation);
}

TEST(Assembled, CompactSupportHasNoBoundaryTermsAndConverges) {
    std::vector<double> e;
    for (int n : {32, 64, 128}) {
        Sampler s(12);
        const Grid g({n, n, 1}, {1.0 / (n - 1), 1.0 / (n - 1), 1.0}, BoundaryMode::box);
        const PlacementState p = random_state(g, s, 0.01);
        const Vec3 c{{0.5, 0.5, 0.0}}, a{{0.3, -0.7, 0.2}}, b{{-0.4, 0.1, 0.9}};
        const Variation v{make_field(g, [&](std::size_t i) { return bump(g.position(i), c, 0.3) * a; }),
                          make_field(g, [&](std::size_t i) { return bump(g.position(i), c, 0.3) * b; })};
        const auto r = first_variation_assembled(p, gradient_model(), v);
        EXPECT_EQ(r.surface, 0.0);
        EXPECT_EQ(r.edge, 0.0);
        e.push_back(std::abs(r.bulk - first_variation_direct(p, gradient_model(), v)));
    }
    EXPECT_GT(std::log2(e[1] / e[2]), 1.8) << e[0] << " " << e[1] << " " << e[2];
}

TEST(Assembled, BoundaryActiveVariationsConverge) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::vector<double> e;
        for (int n : {8, 16, 32}) {
            Sampler s(seed);
            const Grid g = Grid::cube(n, 1.0, BoundaryMode::box);
            const PlacementState p = random_state(g, s, 0.01);
            const Variation v = random_variation(g, s);
            e.push_back(std::abs(first_variation_assembled(p, gradient_model(), v).total -
                                 first_variation_direct(p, gradient_model(), v)));
        }
        EXPECT_GT(std::log2(e[1] / e[2]), 1.8) << e[0] << " " << e[1] << " " << e[2];
    }
}

TEST(ExternalWork, ZeroLoads) {
    Sampler s(13);
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    EXPECT_EQ(external_work(random_state(g, s), 1.0, Loads{}, random_variation(g, s)), 0.0);
}

TEST(ExternalWork, PressureOnOneFaceAtReference) {
    const Grid g = Grid::cube(6, 2.0, BoundaryMode::box);
    Variation v = Variation::zero(g);
    v.delta_chi_s = make_field(g, [&](std::size_t n) { return (g.position(n)[0] / 2.0) * Vec3::unit(0); });
    const Loads loads{0.7, 0.0, {}};
    EXPECT_NEAR(external_work(PlacementState::identity(g), 1.0, loads, v), -0.7 * 4.0, 1e-13);
}

TEST(ExternalWork, ChemicalPotentialWorksOnMassChange) {
    // Constant μ^ext: the boundary work equals ∫ μ^ext δm_f up to discrete
    // integration by parts.
    std::vector<double> e;
    for (int n : {8, 16, 32}) {
        Sampler s(14);
        const Grid g = Grid::cube(n, 1.0, BoundaryMode::box);
        const PlacementState p = random_state(g, s, 0.005);
        const Variation v = random_variation(g, s);
        const auto k = compute_kinematics(p);
        const double mu = 0.8;
        const double bulk = mu * integrate(delta_mass(k, fluid_mass_content(k, 1.0), v));
        e.push_back(std::abs(external_work(p, 1.0, Loads{0.0, mu, {}}, v) - bulk));
    }
    EXPECT_GT(std::log2(e[1] / e[2]), 1.8) << e[0] << " " << e[1] << " " << e[2];
}

TEST(ExternalWork, RejectsFacesOfInactiveAxes) {
    const Grid g = Grid::column(8, 1.0);
    const Loads loads{1.0, 0.0, {Face{1, 1}}};
    EXPECT_THROW(external_forces(PlacementState::identity(g), 1.0, loads), InvalidArgument);
}

TEST(DissipationWork, VanishesWithoutRelativeVelocity) {
    Sampler s(15);
    const Grid g = Grid::cube(6, 1.0, BoundaryMode::box);
    const DissipationModel dm(s.spd(), s.spd());
    const auto p = random_state(g, s);
    const auto v = random_variation(g, s);
    EXPECT_EQ(dissipation_work(p, dm, Field<Vec3>(g), v), 0.0);
    EXPECT_EQ(dissipation_work_eulerian(p, dm, Field<Vec3>(g), v), 0.0);
}

TEST(DissipationWork, DarcyAtReference) {
    const Grid g = Grid::cube(6, 2.0, BoundaryMode::box);
    const DissipationModel dm(Tensor2::identity(), Tensor2{});
    const Vec3 u{{0.3, -0.2, 0.5}}, w{{1.0, 2.0, -1.0}};
    Variation v = Variation::zero(g);
    v.delta_phi_f = Field<Vec3>(g, w);
    const auto p = PlacementState::identity(g);
    EXPECT_NEAR(dissipation_work(p, dm, Field<Vec3>(g, u), v), 8.0 * dot(u, w), 1e-13);
    EXPECT_NEAR(dissipation_work_eulerian(p, dm, Field<Vec3>(g, u), v), 8.0 * dot(u, w), 1e-13);
}

TEST(DissipationWork, DarcyFormsAgreeExactlyAtFiniteStrain) {
    Sampler s(16);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const DissipationModel dm(s.spd(0.5, 2.0), Tensor2{});
    const auto p = random_state(g, s, 0.005);
    const auto V = smooth_vector_field(g, s, 0.3);
    const auto v = random_variation(g, s);
    const double a = dissipation_work(p, dm, V, v), b = dissipation_work_eulerian(p, dm, V, v);
    EXPECT_NEAR(a, b, 1e-13 * std::abs(a));
}

TEST(DissipationWork, BrinkmanFormsAgreeUnderRefinement) {
    std::vector<double> e;
    for (int n : {16, 32, 64}) {
        Sampler s(17);
        const Grid g({n, n, 1}, {1.0 / (n - 1), 1.0 / (n - 1), 1.0}, BoundaryMode::box);
        const DissipationModel dm(s.spd(0.5, 2.0), s.spd(0.1, 1.0));
        const auto p = random_state(g, s, 0.02);
        const auto V = smooth_vector_field(g, s, 0.3);
        const auto v = random_variation(g, s);
        e.push_back(std::abs(dissipation_work(p, dm, V, v) - dissipation_work_eulerian(p, dm, V, v)));
    }
    EXPECT_GT(std::log2(e[1] / e[2]), 1.8) << e[0] << " " << e[1] << " " << e[2];
}

TEST(DissipationWork, NodalFormIsAdjoint) {
    Sampler s(18);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const DissipationModel dm(s.spd(0.5, 2.0), s.spd(0.1, 1.0));
    const auto p = random_state(g, s, 0.005);
    const auto V = smooth_vector_field(g, s, 0.3);
    const NodalForces f = dissipation_forces(p, dm, V);
    EXPECT_EQ(max_abs(f.chi), 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto v = random_variation(g, s);
        const double a = dissipation_work_eulerian(p, dm, V, v);
        EXPECT_NEAR(f.pair(v), a, 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST(VirtualWork, ZeroAtUnloadedReference) {
    Sampler s(19);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const DissipationModel dm(Tensor2::identity(), Tensor2{});
    const auto p = PlacementState::identity(g);
    for (int trial = 0; trial < 5; ++trial)
        EXPECT_EQ(virtual_work_residual(p, gradient_model(), dm, Loads{}, Field<Vec3>(g), random_variation(g, s)), 0.0);
}

TEST(VirtualWork, NonzeroAwayFromEquilibrium) {
    Sampler s(20);
    const Grid g = Grid::cube(8, 1.0, BoundaryMode::box);
    const DissipationModel dm(Tensor2::identity(), Tensor2{});
    const auto p = random_state(g, s, 0.01);
    EXPECT_GT(std::abs(virtual_work_residual(p, gradient_model(), dm, Loads{}, Field<Vec3>(g), random_variation(g, s))),
              1e-6);
}
