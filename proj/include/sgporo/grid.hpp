#pragma once

// Structured rectangular grids, nodal fields and the 1-D stencils every
// discrete operator is built from.
//
// An axis with a single node is inactive: derivatives along it vanish and its
// quadrature weight is the node spacing (slab thickness). Box faces exist only
// on active axes and edges only where two active axes meet.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sgporo/errors.hpp"
#include "sgporo/tensor.hpp"

namespace sgporo {

enum class BoundaryMode { periodic, box };

// One derivative row: f'_i ≈ Σ coeff·f_node.
struct StencilRow {
    std::vector<std::pair<int, double>> taps;
};

// Derivative matrix and quadrature weights of one axis.
struct AxisOperator {
    int n = 1;
    double h = 1.0;
    bool periodic = false;
    std::vector<StencilRow> rows;  // empty for an inactive axis
    std::vector<double> weights;
};

struct Face {
    int axis = 0;
    int side = -1;  // -1: lower face, +1: upper face

    Vec3 normal() const { return static_cast<double>(side) * Vec3::unit(axis); }
    std::string name() const;
    bool operator==(const Face&) const = default;
};

// Line where face a meets face b; it runs along `line_axis`.
struct Edge {
    Face a;
    Face b;
    int line_axis = 0;
};

class Grid {
public:
    Grid(std::array<int, 3> extents, std::array<double, 3> spacing, BoundaryMode mode,
         Vec3 origin = {});

    // Column of n nodes along axis 0 with height H; the other axes are inactive
    // with unit thickness.
    static Grid column(int n, double height);
    // n×n×n box (or periodic cube) of side length L.
    static Grid cube(int n, double length, BoundaryMode mode);

    const std::array<int, 3>& extents() const { return extents_; }
    const std::array<double, 3>& spacing() const { return spacing_; }
    BoundaryMode mode() const { return mode_; }
    const Vec3& origin() const { return origin_; }
    bool periodic() const { return mode_ == BoundaryMode::periodic; }
    bool active(int axis) const { return extents_[static_cast<std::size_t>(axis)] > 1; }

    std::size_t node_count() const { return count_; }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(extents_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(extents_[1]) * static_cast<std::size_t>(k));
    }
    std::array<int, 3> ijk(std::size_t n) const {
        const auto nx = static_cast<std::size_t>(extents_[0]);
        const auto ny = static_cast<std::size_t>(extents_[1]);
        return {static_cast<int>(n % nx), static_cast<int>((n / nx) % ny), static_cast<int>(n / (nx * ny))};
    }
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    // Reference position of a node. Periodic grids place n nodes on a period
    // of length n·h.
    Vec3 position(std::size_t n) const;
    double length(int axis) const;

    const AxisOperator& axis_operator(int axis) const { return (*ops_)[static_cast<std::size_t>(axis)]; }
    double weight(std::size_t n) const;

    std::vector<Face> faces() const;
    std::vector<Edge> edges() const;
    std::vector<std::size_t> face_nodes(const Face& f) const;
    std::vector<double> face_weights(const Face& f) const;
    std::vector<std::size_t> edge_nodes(const Edge& e) const;
    std::vector<double> edge_weights(const Edge& e) const;

    bool operator==(const Grid& o) const {
        return extents_ == o.extents_ && spacing_ == o.spacing_ && mode_ == o.mode_ &&
               origin_.c == o.origin_.c;
    }

private:
    std::array<int, 3> extents_;
    std::array<double, 3> spacing_;
    BoundaryMode mode_;
    Vec3 origin_;
    std::size_t count_ = 0;
    std::array<std::size_t, 3> strides_{};
    std::shared_ptr<const std::array<AxisOperator, 3>> ops_;
};

// Builds the derivative stencil and compatible quadrature weights of one axis.
AxisOperator make_axis_operator(int n, double h, bool periodic);

template <class T>
class Field {
public:
    using value_type = T;

    explicit Field(const Grid& g, const T& init = T{}) : grid_(g), values_(g.node_count(), init) {}
    Field(const Grid& g, std::vector<T> values) : grid_(g), values_(std::move(values)) {
        if (values_.size() != grid_.node_count())
            throw InvalidArgument("Field: value count does not match node count");
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    T& operator[](std::size_t n) { return values_[n]; }
    const T& operator[](std::size_t n) const { return values_[n]; }
    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    Field& operator+=(const Field& o) {
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

private:
    Grid grid_;
    std::vector<T> values_;
};

template <class T>
Field<T> operator+(Field<T> a, const Field<T>& b) { return a += b; }
template <class T>
Field<T> operator-(Field<T> a, const Field<T>& b) { return a -= b; }
template <class T>
Field<T> operator*(double s, Field<T> a) { return a *= s; }
template <class T>
Field<T> operator*(Field<T> a, double s) { return a *= s; }

// Field built from a per-node generator fn(node).
template <class Fn>
auto make_field(const Grid& g, Fn&& fn) {
    using T = std::decay_t<decltype(fn(std::size_t{0}))>;
    std::vector<T> v;
    v.reserve(g.node_count());
    for (std::size_t n = 0; n < g.node_count(); ++n) v.push_back(fn(n));
    return Field<T>(g, std::move(v));
}

template <class T>
double max_abs(const Field<T>& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, max_abs(v));
    return m;
}

Field<Vec3> positions(const Grid& g);

// Σ_n w_n f_n with a pairwise reduction (fixed summation order).
double integrate(const Field<double>& f);
double pairwise_sum(const std::vector<double>& v);

}  // namespace sgporo
