#pragma once

// Discrete differential operators on nodal fields. Every operator is a
// composition of the per-axis first-derivative stencil, so higher
// derivatives are literally repeated application of the same matrix.

#include <cstddef>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "sgporo/errors.hpp"
#include "sgporo/grid.hpp"
#include "sgporo/tensor.hpp"

namespace sgporo {

template <class T>
struct GradOf;
template <>
struct GradOf<double> {
    using type = Vec3;
};
template <>
struct GradOf<Vec3> {
    using type = Tensor2;
};
template <>
struct GradOf<Tensor2> {
    using type = Tensor3;
};

template <class T>
struct DivOf;
template <>
struct DivOf<Vec3> {
    using type = double;
};
template <>
struct DivOf<Tensor2> {
    using type = Vec3;
};
template <>
struct DivOf<Tensor3> {
    using type = Tensor2;
};

namespace detail {

template <class T>
constexpr std::size_t ncomp() {
    if constexpr (std::is_same_v<T, double>)
        return 1;
    else
        return std::tuple_size_v<decltype(T::c)>;
}
template <class T>
double& comp(T& v, std::size_t p) {
    if constexpr (std::is_same_v<T, double>)
        return v;
    else
        return v.c[p];
}
template <class T>
double comp(const T& v, std::size_t p) {
    if constexpr (std::is_same_v<T, double>)
        return v;
    else
        return v.c[p];
}

}  // namespace detail

// First derivative along one axis. Rows are applied in difference form,
// Σ_j a_j (f_j - f_i), so constants are annihilated exactly.
template <class T>
Field<T> partial(const Field<T>& f, int axis) {
    const Grid& g = f.grid();
    Field<T> out(g);
    if (!g.active(axis)) return out;
    const auto& op = g.axis_operator(axis);
    const std::size_t stride = g.stride(axis);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const int i = g.ijk(n)[static_cast<std::size_t>(axis)];
        const std::size_t base = n - static_cast<std::size_t>(i) * stride;
        T acc{};
        for (const auto& [j, a] : op.rows[static_cast<std::size_t>(i)].taps)
            if (j != i) acc += a * (f[base + static_cast<std::size_t>(j) * stride] - f[n]);
        out[n] = acc;
    }
    return out;
}

// Derivative along one axis at a single node.
template <class T>
T partial_at(const Field<T>& f, int axis, std::size_t n) {
    const Grid& g = f.grid();
    T acc{};
    if (!g.active(axis)) return acc;
    const auto& op = g.axis_operator(axis);
    const std::size_t stride = g.stride(axis);
    const int i = g.ijk(n)[static_cast<std::size_t>(axis)];
    const std::size_t base = n - static_cast<std::size_t>(i) * stride;
    for (const auto& [j, a] : op.rows[static_cast<std::size_t>(i)].taps)
        if (j != i) acc += a * (f[base + static_cast<std::size_t>(j) * stride] - f[n]);
    return acc;
}

// Transpose of the derivative matrix: Σ_n g_n (D f)_n = Σ_m f_m (D^T g)_m.
template <class T>
Field<T> partial_transpose(const Field<T>& f, int axis) {
    const Grid& g = f.grid();
    Field<T> out(g);
    if (!g.active(axis)) return out;
    const auto& op = g.axis_operator(axis);
    const std::size_t stride = g.stride(axis);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const int i = g.ijk(n)[static_cast<std::size_t>(axis)];
        const std::size_t base = n - static_cast<std::size_t>(i) * stride;
        for (const auto& [j, a] : op.rows[static_cast<std::size_t>(i)].taps)
            if (j != i) {
                const T v = a * f[n];
                out[base + static_cast<std::size_t>(j) * stride] += v;
                out[n] -= v;
            }
    }
    return out;
}

// Lagrangian gradient: appends one trailing index.
template <class T>
Field<typename GradOf<T>::type> grad(const Field<T>& f) {
    using G = typename GradOf<T>::type;
    constexpr std::size_t m = detail::ncomp<T>();
    Field<G> out(f.grid());
    for (int a = 0; a < 3; ++a) {
        if (!f.grid().active(a)) continue;
        const Field<T> d = partial(f, a);
        for (std::size_t n = 0; n < f.size(); ++n)
            for (std::size_t p = 0; p < m; ++p) out[n].c[3 * p + static_cast<std::size_t>(a)] = detail::comp(d[n], p);
    }
    return out;
}

// Adjoint of grad with respect to the plain nodal sum.
template <class G>
Field<typename DivOf<G>::type> grad_transpose(const Field<G>& f) {
    using T = typename DivOf<G>::type;
    constexpr std::size_t m = detail::ncomp<T>();
    Field<T> out(f.grid());
    for (int a = 0; a < 3; ++a) {
        if (!f.grid().active(a)) continue;
        Field<T> slice(f.grid());
        for (std::size_t n = 0; n < f.size(); ++n)
            for (std::size_t p = 0; p < m; ++p) detail::comp(slice[n], p) = f[n].c[3 * p + static_cast<std::size_t>(a)];
        out += partial_transpose(slice, a);
    }
    return out;
}

// Divergence: contraction of the gradient over its last two indices.
template <class G>
Field<typename DivOf<G>::type> div(const Field<G>& f) {
    using T = typename DivOf<G>::type;
    constexpr std::size_t m = detail::ncomp<T>();
    Field<T> out(f.grid());
    for (int a = 0; a < 3; ++a) {
        if (!f.grid().active(a)) continue;
        Field<T> slice(f.grid());
        for (std::size_t n = 0; n < f.size(); ++n)
            for (std::size_t p = 0; p < m; ++p) detail::comp(slice[n], p) = f[n].c[3 * p + static_cast<std::size_t>(a)];
        out += partial(slice, a);
    }
    return out;
}

// Face operators. Tangential derivatives use the same stencils as the volume
// operators, restricted to the face nodes (in Grid::face_nodes order).

inline void require_box(const Grid& g, const char* what) {
    if (g.periodic()) throw UnsupportedOperation(std::string(what) + ": periodic grids have no boundary");
}

// ∂f/∂n = (∂f/∂X_axis)·side at each face node.
template <class T>
std::vector<T> normal_derivative(const Field<T>& f, const Face& face) {
    require_box(f.grid(), "normal_derivative");
    std::vector<T> out;
    for (std::size_t n : f.grid().face_nodes(face)) out.push_back(static_cast<double>(face.side) * partial_at(f, face.axis, n));
    return out;
}

// ∇^S f: gradient with the normal column removed.
template <class T>
std::vector<typename GradOf<T>::type> surface_grad(const Field<T>& f, const Face& face) {
    require_box(f.grid(), "surface_grad");
    using G = typename GradOf<T>::type;
    constexpr std::size_t m = detail::ncomp<T>();
    std::vector<G> out;
    for (std::size_t n : f.grid().face_nodes(face)) {
        G v{};
        for (int a = 0; a < 3; ++a) {
            if (a == face.axis) continue;
            const T d = partial_at(f, a, n);
            for (std::size_t p = 0; p < m; ++p) v.c[3 * p + static_cast<std::size_t>(a)] = detail::comp(d, p);
        }
        out.push_back(v);
    }
    return out;
}

// div^S f := Σ over in-face directions of (∂f/∂x_α)·e_α.
template <class G>
std::vector<typename DivOf<G>::type> surface_div(const Field<G>& f, const Face& face) {
    require_box(f.grid(), "surface_div");
    using T = typename DivOf<G>::type;
    constexpr std::size_t m = detail::ncomp<T>();
    std::vector<T> out;
    for (std::size_t n : f.grid().face_nodes(face)) {
        T v{};
        for (int a = 0; a < 3; ++a) {
            if (a == face.axis) continue;
            const G d = partial_at(f, a, n);
            for (std::size_t p = 0; p < m; ++p) detail::comp(v, p) += d.c[3 * p + static_cast<std::size_t>(a)];
        }
        out.push_back(v);
    }
    return out;
}

struct SurfaceOps {
    std::vector<double> surface_div;
    std::vector<Tensor2> surface_grad;
    std::vector<Vec3> normal_derivative;
};

// Surface operators of a vector field on one face.
SurfaceOps surface_ops(const Field<Vec3>& f, const Face& face);

// ∇_s of a placement field, evaluated as I + ∇_s(placement − X) so that
// periodic grids and inactive axes are handled consistently.
Field<Tensor2> placement_gradient(const Field<Vec3>& placement);

// div_s[det(∇φ)(∇φ)^{-T}]; throws SingularConfiguration if det ∇φ ≤ 1e-12.
Field<Vec3> piola_residual(const Field<Vec3>& phi);

// Singular-configuration threshold shared by all modules.
inline constexpr double kSingularDet = 1e-12;

}  // namespace sgporo
