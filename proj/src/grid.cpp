#include "sgporo/grid.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace sgporo {

namespace {

// Values at x = -1 of the Lagrange basis through nodes 0..q: the ghost value
// below the first node extrapolated by a degree-q polynomial. In closed form
// c_j = (-1)^j binom(q+1, j+1).
std::vector<double> ghost_coefficients(int q) {
    std::vector<double> c(static_cast<std::size_t>(q + 1));
    double binom = q + 1;  // binom(q+1, 1)
    for (int j = 0; j <= q; ++j) {
        c[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * binom;
        binom = binom * (q + 1 - (j + 1)) / (j + 2);
    }
    return c;
}

constexpr int kMaxGhostDegree = 6;

}  // namespace

std::string Face::name() const {
    static const char* axes = "xyz";
    return std::string(side < 0 ? "-" : "+") + axes[axis];
}

AxisOperator make_axis_operator(int n, double h, bool periodic) {
    AxisOperator op;
    op.n = n;
    op.h = h;
    op.periodic = periodic;
    if (n == 1) {
        op.weights = {h};
        return op;
    }
    const double s = 0.5 / h;
    op.rows.resize(static_cast<std::size_t>(n));
    for (int i = 1; i + 1 < n; ++i) op.rows[static_cast<std::size_t>(i)].taps = {{i - 1, -s}, {i + 1, s}};
    if (periodic) {
        op.rows.front().taps = {{n - 1, -s}, {1, s}};
        op.rows.back().taps = {{n - 2, -s}, {0, s}};
        op.weights.assign(static_cast<std::size_t>(n), h);
        return op;
    }

    // Central difference across the face using the extrapolated ghost value.
    const int q = std::min(kMaxGhostDegree, n - 1);
    const auto g = ghost_coefficients(q);
    std::vector<double> first(static_cast<std::size_t>(n), 0.0);
    first[1] += s;
    for (int j = 0; j <= q; ++j) first[static_cast<std::size_t>(j)] -= s * g[static_cast<std::size_t>(j)];
    for (int j = 0; j < n; ++j) {
        const double a = first[static_cast<std::size_t>(j)];
        if (a != 0.0) {
            op.rows.front().taps.emplace_back(j, a);
            op.rows.back().taps.emplace_back(n - 1 - j, -a);
        }
    }

    // Compatible weights: D^T w = e_last - e_first, so Σ w·(D f) = f_last - f_first.
    // Of all solutions take the one closest to the trapezoid rule.
    Eigen::MatrixXd Dt = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, a] : op.rows[static_cast<std::size_t>(i)].taps) Dt(j, i) += a;
    Eigen::VectorXd trap = Eigen::VectorXd::Constant(n, h);
    trap(0) = trap(n - 1) = 0.5 * h;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = -1.0;
    rhs(n - 1) = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Dt);
    Eigen::VectorXd w = trap + cod.solve(rhs - Dt * trap);
    op.weights.assign(w.data(), w.data() + n);
    return op;
}

Grid::Grid(std::array<int, 3> extents, std::array<double, 3> spacing, BoundaryMode mode, Vec3 origin)
    : extents_(extents), spacing_(spacing), mode_(mode), origin_(origin) {
    auto ops = std::make_shared<std::array<AxisOperator, 3>>();
    for (int a = 0; a < 3; ++a) {
        const int n = extents_[static_cast<std::size_t>(a)];
        const double h = spacing_[static_cast<std::size_t>(a)];
        if (n < 1) throw InvalidArgument("Grid: extents must be positive");
        if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("Grid: spacing must be positive");
        if (n == 2) throw InvalidArgument("Grid: an active axis needs at least 3 nodes");
        (*ops)[static_cast<std::size_t>(a)] = make_axis_operator(n, h, mode == BoundaryMode::periodic);
    }
    ops_ = ops;
    count_ = static_cast<std::size_t>(extents_[0]) * static_cast<std::size_t>(extents_[1]) *
             static_cast<std::size_t>(extents_[2]);
    strides_ = {1, static_cast<std::size_t>(extents_[0]),
                static_cast<std::size_t>(extents_[0]) * static_cast<std::size_t>(extents_[1])};
}

Grid Grid::column(int n, double height) {
    if (n < 3) throw InvalidArgument("Grid::column: need at least 3 nodes");
    return Grid({n, 1, 1}, {height / (n - 1), 1.0, 1.0}, BoundaryMode::box);
}

Grid Grid::cube(int n, double length, BoundaryMode mode) {
    const double h = mode == BoundaryMode::periodic ? length / n : length / (n - 1);
    return Grid({n, n, n}, {h, h, h}, mode);
}

Vec3 Grid::position(std::size_t n) const {
    const auto idx = ijk(n);
    Vec3 x = origin_;
    for (int a = 0; a < 3; ++a)
        if (active(a)) x[a] += idx[static_cast<std::size_t>(a)] * spacing_[static_cast<std::size_t>(a)];
    return x;
}

double Grid::length(int axis) const {
    const auto n = extents_[static_cast<std::size_t>(axis)];
    const auto h = spacing_[static_cast<std::size_t>(axis)];
    if (n == 1) return h;
    return periodic() ? n * h : (n - 1) * h;
}

double Grid::weight(std::size_t n) const {
    const auto idx = ijk(n);
    double w = 1.0;
    for (int a = 0; a < 3; ++a) w *= axis_operator(a).weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    return w;
}

std::vector<Face> Grid::faces() const {
    std::vector<Face> out;
    if (periodic()) return out;
    for (int a = 0; a < 3; ++a)
        if (active(a)) {
            out.push_back({a, -1});
            out.push_back({a, +1});
        }
    return out;
}

std::vector<Edge> Grid::edges() const {
    std::vector<Edge> out;
    if (periodic()) return out;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            if (!active(a) || !active(b)) continue;
            const int c = 3 - a - b;
            for (int sa : {-1, 1})
                for (int sb : {-1, 1}) out.push_back({{a, sa}, {b, sb}, c});
        }
    return out;
}

std::vector<std::size_t> Grid::face_nodes(const Face& f) const {
    const int t1 = (f.axis + 1) % 3, t2 = (f.axis + 2) % 3;
    const int fixed = f.side < 0 ? 0 : extents_[static_cast<std::size_t>(f.axis)] - 1;
    std::vector<std::size_t> out;
    for (int j = 0; j < extents_[static_cast<std::size_t>(t2)]; ++j)
        for (int i = 0; i < extents_[static_cast<std::size_t>(t1)]; ++i) {
            std::array<int, 3> idx{};
            idx[static_cast<std::size_t>(f.axis)] = fixed;
            idx[static_cast<std::size_t>(t1)] = i;
            idx[static_cast<std::size_t>(t2)] = j;
            out.push_back(index(idx[0], idx[1], idx[2]));
        }
    return out;
}

std::vector<double> Grid::face_weights(const Face& f) const {
    const int t1 = (f.axis + 1) % 3, t2 = (f.axis + 2) % 3;
    const auto& w1 = axis_operator(t1).weights;
    const auto& w2 = axis_operator(t2).weights;
    std::vector<double> out;
    for (double b : w2)
        for (double a : w1) out.push_back(a * b);
    return out;
}

std::vector<std::size_t> Grid::edge_nodes(const Edge& e) const {
    std::vector<std::size_t> out;
    std::array<int, 3> idx{};
    idx[static_cast<std::size_t>(e.a.axis)] = e.a.side < 0 ? 0 : extents_[static_cast<std::size_t>(e.a.axis)] - 1;
    idx[static_cast<std::size_t>(e.b.axis)] = e.b.side < 0 ? 0 : extents_[static_cast<std::size_t>(e.b.axis)] - 1;
    for (int i = 0; i < extents_[static_cast<std::size_t>(e.line_axis)]; ++i) {
        idx[static_cast<std::size_t>(e.line_axis)] = i;
        out.push_back(index(idx[0], idx[1], idx[2]));
    }
    return out;
}

std::vector<double> Grid::edge_weights(const Edge& e) const { return axis_operator(e.line_axis).weights; }

Field<Vec3> positions(const Grid& g) {
    return make_field(g, [&](std::size_t n) { return g.position(n); });
}

double pairwise_sum(const std::vector<double>& v) {
    // Blocks of 8 summed sequentially, blocks combined pairwise.
    std::vector<double> level;
    level.reserve(v.size() / 8 + 1);
    for (std::size_t i = 0; i < v.size(); i += 8) {
        double s = 0.0;
        for (std::size_t j = i; j < std::min(v.size(), i + 8); ++j) s += v[j];
        level.push_back(s);
    }
    while (level.size() > 1) {
        std::vector<double> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = level[2 * i] + (2 * i + 1 < level.size() ? level[2 * i + 1] : 0.0);
        level.swap(next);
    }
    return level.empty() ? 0.0 : level[0];
}

double integrate(const Field<double>& f) {
    const Grid& g = f.grid();
    std::vector<double> terms(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) terms[n] = g.weight(n) * f[n];
    return pairwise_sum(terms);
}

}  // namespace sgporo
