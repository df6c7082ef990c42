#pragma once

// Seeded random inputs for property checks: tensors, SPD matrices and smooth
// fields built from a few low Fourier modes.

#include <cstdint>
#include <random>

#include "sgporo/grid.hpp"
#include "sgporo/tensor.hpp"

namespace sgporo {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Vec3 vec(double scale = 1.0);
    Tensor2 tensor2(double scale = 1.0);
    Tensor3 tensor3(double scale = 1.0);
    Tensor2 symmetric(double scale = 1.0);
    // Symmetric positive-definite with eigenvalues in [lo, hi].
    Tensor2 spd(double lo = 0.1, double hi = 2.0);
    // Proper orthogonal matrix.
    Tensor2 rotation();

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Σ over `modes` terms of amplitude·a_m·sin(2π k_m·ξ + θ_m)·cos(2π l_m·ξ + θ'_m),
// ξ = (X - origin)/L, with wavenumbers in {0,1} on the active axes
// (periodic-compatible on periodic grids).
Field<double> smooth_scalar_field(const Grid& g, Sampler& s, double amplitude, int modes = 3);
Field<Vec3> smooth_vector_field(const Grid& g, Sampler& s, double amplitude, int modes = 3);

// Σ over `modes` terms of amplitude·a_m·Π_axes P_m,a(ξ_a), each P a random
// cubic on ξ ∈ [0, 1]. Not periodic, so boundary terms do not cancel
// between opposite faces.
Field<Vec3> polynomial_vector_field(const Grid& g, Sampler& s, double amplitude, int modes = 3);

// X + u with u a smooth vector field.
Field<Vec3> perturbed_identity(const Grid& g, Sampler& s, double amplitude, int modes = 3);

}  // namespace sgporo
