#include "sgporo/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace sgporo {

Vec3 Sampler::vec(double scale) {
    Vec3 v;
    for (auto& x : v.c) x = scale * uniform();
    return v;
}

Tensor2 Sampler::tensor2(double scale) {
    Tensor2 t;
    for (auto& x : t.c) x = scale * uniform();
    return t;
}

Tensor3 Sampler::tensor3(double scale) {
    Tensor3 t;
    for (auto& x : t.c) x = scale * uniform();
    return t;
}

Tensor2 Sampler::symmetric(double scale) { return sym(tensor2(scale)); }

Tensor2 Sampler::rotation() {
    // Gram-Schmidt on two random vectors, third by cross product.
    Vec3 a = vec(), b = vec();
    while (norm(a) < 1e-3) a = vec();
    a = a / norm(a);
    b -= dot(a, b) * a;
    while (norm(b) < 1e-3) {
        b = vec();
        b -= dot(a, b) * a;
    }
    b = b / norm(b);
    const Vec3 c = cross(a, b);
    Tensor2 Q;
    for (int j = 0; j < 3; ++j) {
        Q(j, 0) = a[j];
        Q(j, 1) = b[j];
        Q(j, 2) = c[j];
    }
    return Q;
}

Tensor2 Sampler::spd(double lo, double hi) {
    const Tensor2 Q = rotation();
    Tensor2 L;
    for (int i = 0; i < 3; ++i) L(i, i) = uniform(lo, hi);
    return dot(dot(Q, L), transpose(Q));
}

namespace {

struct Mode {
    std::array<int, 3> k{};
    std::array<int, 3> l{};
    double phase = 0.0;
    double phase2 = 0.0;
    Vec3 amp;
};

std::vector<Mode> draw_modes(const Grid& g, Sampler& s, int modes) {
    std::vector<Mode> out;
    for (int m = 0; m < modes; ++m) {
        Mode md;
        bool any = false;
        for (int a = 0; a < 3; ++a) {
            if (!g.active(a)) continue;
            md.k[static_cast<std::size_t>(a)] = s.integer(0, 1);
            any = any || md.k[static_cast<std::size_t>(a)] != 0;
        }
        if (!any)
            for (int a = 0; a < 3; ++a)
                if (g.active(a)) {
                    md.k[static_cast<std::size_t>(a)] = 1;
                    break;
                }
        for (int a = 0; a < 3; ++a)
            if (g.active(a)) md.l[static_cast<std::size_t>(a)] = s.integer(0, 1);
        md.phase = s.uniform(0.0, 2.0 * std::numbers::pi);
        md.phase2 = s.uniform(0.0, 2.0 * std::numbers::pi);
        md.amp = s.vec();
        out.push_back(md);
    }
    return out;
}

// sin(2π k·ξ + θ)·cos(2π l·ξ + θ'), ξ the position scaled to the unit cell.
double mode_value(const Grid& g, const Mode& md, const Vec3& x) {
    double arg = md.phase, arg2 = md.phase2;
    for (int a = 0; a < 3; ++a)
        if (g.active(a)) {
            const double xi = 2.0 * std::numbers::pi * (x[a] - g.origin()[a]) / g.length(a);
            arg += md.k[static_cast<std::size_t>(a)] * xi;
            arg2 += md.l[static_cast<std::size_t>(a)] * xi;
        }
    return std::sin(arg) * std::cos(arg2);
}

}  // namespace

Field<double> smooth_scalar_field(const Grid& g, Sampler& s, double amplitude, int modes) {
    const auto md = draw_modes(g, s, modes);
    return make_field(g, [&](std::size_t n) {
        const Vec3 x = g.position(n);
        double v = 0.0;
        for (const auto& m : md) v += amplitude * m.amp[0] * mode_value(g, m, x);
        return v;
    });
}

Field<Vec3> smooth_vector_field(const Grid& g, Sampler& s, double amplitude, int modes) {
    const auto md = draw_modes(g, s, modes);
    return make_field(g, [&](std::size_t n) {
        const Vec3 x = g.position(n);
        Vec3 v;
        for (const auto& m : md) v += (amplitude * mode_value(g, m, x)) * m.amp;
        return v;
    });
}

Field<Vec3> polynomial_vector_field(const Grid& g, Sampler& s, double amplitude, int modes) {
    struct Term {
        std::array<std::array<double, 4>, 3> c{};
        Vec3 amp;
    };
    std::vector<Term> terms(static_cast<std::size_t>(std::max(modes, 0)));
    for (auto& t : terms) {
        for (auto& axis : t.c)
            for (double& x : axis) x = s.uniform();
        t.amp = s.vec();
    }
    return make_field(g, [&](std::size_t n) {
        const Vec3 x = g.position(n);
        Vec3 v;
        for (const auto& t : terms) {
            double prod = 1.0;
            for (int a = 0; a < 3; ++a) {
                if (!g.active(a)) continue;
                const double xi = (x[a] - g.origin()[a]) / g.length(a);
                const auto& c = t.c[static_cast<std::size_t>(a)];
                prod *= c[0] + xi * (c[1] + xi * (c[2] + xi * c[3]));
            }
            v += (amplitude * prod) * t.amp;
        }
        return v;
    });
}

Field<Vec3> perturbed_identity(const Grid& g, Sampler& s, double amplitude, int modes) {
    Field<Vec3> u = smooth_vector_field(g, s, amplitude, modes);
    for (std::size_t n = 0; n < u.size(); ++n) u[n] += g.position(n);
    return u;
}

}  // namespace sgporo
