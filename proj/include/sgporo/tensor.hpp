#pragma once

// Small dense tensors in 3-D: vectors, second- and third-order tensors stored
// row-major. Index conventions:
//   Tensor2 A(i,j) = A_ij,  A·a = A_ij a_j,  A:B = A_ij B_ij
//   Tensor3 t(i,j,k) = t_ijk, t·a contracts the last index,
//   transpose3(t)_kij = t_ijk.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sgporo {

struct Vec3 {
    std::array<double, 3> c{};

    constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    static constexpr Vec3 unit(int i) {
        Vec3 e;
        e[i] = 1.0;
        return e;
    }
};

struct Tensor2 {
    std::array<double, 9> c{};

    constexpr double& operator()(int i, int j) { return c[static_cast<std::size_t>(3 * i + j)]; }
    constexpr double operator()(int i, int j) const { return c[static_cast<std::size_t>(3 * i + j)]; }

    static constexpr Tensor2 identity() {
        Tensor2 t;
        t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
        return t;
    }
};

struct Tensor3 {
    std::array<double, 27> c{};

    constexpr double& operator()(int i, int j, int k) {
        return c[static_cast<std::size_t>(9 * i + 3 * j + k)];
    }
    constexpr double operator()(int i, int j, int k) const {
        return c[static_cast<std::size_t>(9 * i + 3 * j + k)];
    }
};

template <class T>
concept DenseTensor = requires(T t) {
    t.c.size();
    t.c[0];
};

// Componentwise linear algebra shared by all three types.

template <DenseTensor T>
constexpr T& operator+=(T& a, const T& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
    return a;
}
template <DenseTensor T>
constexpr T& operator-=(T& a, const T& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}
template <DenseTensor T>
constexpr T& operator*=(T& a, double s) {
    for (auto& x : a.c) x *= s;
    return a;
}
template <DenseTensor T>
constexpr T operator+(T a, const T& b) { return a += b; }
template <DenseTensor T>
constexpr T operator-(T a, const T& b) { return a -= b; }
template <DenseTensor T>
constexpr T operator-(T a) { return a *= -1.0; }
template <DenseTensor T>
constexpr T operator*(T a, double s) { return a *= s; }
template <DenseTensor T>
constexpr T operator*(double s, T a) { return a *= s; }
template <DenseTensor T>
constexpr T operator/(T a, double s) { return a *= 1.0 / s; }

template <DenseTensor T>
double norm(const T& a) {
    double s = 0.0;
    for (double x : a.c) s += x * x;
    return std::sqrt(s);
}

template <DenseTensor T>
double max_abs(const T& a) {
    double m = 0.0;
    for (double x : a.c) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(double a) { return std::abs(a); }
inline double norm(double a) { return std::abs(a); }

template <DenseTensor T>
bool all_finite(const T& a) {
    for (double x : a.c)
        if (!std::isfinite(x)) return false;
    return true;
}
inline bool all_finite(double a) { return std::isfinite(a); }

// Vector products.

constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return Vec3{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

constexpr Tensor2 outer(const Vec3& a, const Vec3& b) {
    Tensor2 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = a[i] * b[j];
    return t;
}

// (A⊗a)_ijk = A_ij a_k
constexpr Tensor3 outer(const Tensor2& A, const Vec3& a) {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) t(i, j, k) = A(i, j) * a[k];
    return t;
}

// Single contractions.

constexpr Vec3 dot(const Tensor2& A, const Vec3& a) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = A(i, 0) * a[0] + A(i, 1) * a[1] + A(i, 2) * a[2];
    return r;
}

constexpr Vec3 dot(const Vec3& a, const Tensor2& A) {
    Vec3 r;
    for (int j = 0; j < 3; ++j) r[j] = a[0] * A(0, j) + a[1] * A(1, j) + a[2] * A(2, j);
    return r;
}

constexpr Tensor2 dot(const Tensor2& A, const Tensor2& B) {
    Tensor2 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = A(i, 0) * B(0, j) + A(i, 1) * B(1, j) + A(i, 2) * B(2, j);
    return r;
}

// (t·a)_ij = t_ijk a_k
constexpr Tensor2 dot(const Tensor3& t, const Vec3& a) {
    Tensor2 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = t(i, j, 0) * a[0] + t(i, j, 1) * a[1] + t(i, j, 2) * a[2];
    return r;
}

// (A·t)_ijk = A_il t_ljk
constexpr Tensor3 dot(const Tensor2& A, const Tensor3& t) {
    Tensor3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                r(i, j, k) = A(i, 0) * t(0, j, k) + A(i, 1) * t(1, j, k) + A(i, 2) * t(2, j, k);
    return r;
}

// Double and triple contractions.

constexpr double ddot(const Tensor2& A, const Tensor2& B) {
    double s = 0.0;
    for (std::size_t i = 0; i < 9; ++i) s += A.c[i] * B.c[i];
    return s;
}

// (t:A)_k = t_kij A_ij  (last two indices of t)
constexpr Vec3 ddot(const Tensor3& t, const Tensor2& A) {
    Vec3 r;
    for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += t(k, i, j) * A(i, j);
        r[k] = s;
    }
    return r;
}

// (A:t)_k = A_ij t_ijk  (first two indices of t)
constexpr Vec3 ddot(const Tensor2& A, const Tensor3& t) {
    Vec3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[k] += A(i, j) * t(i, j, k);
    return r;
}

constexpr double tdot(const Tensor3& a, const Tensor3& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 27; ++i) s += a.c[i] * b.c[i];
    return s;
}

// Unary operations.

constexpr Tensor2 transpose(const Tensor2& A) {
    Tensor2 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = A(j, i);
    return r;
}

// (t^T)_kij = t_ijk
constexpr Tensor3 transpose3(const Tensor3& t) {
    Tensor3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r(k, i, j) = t(i, j, k);
    return r;
}

constexpr Tensor2 sym(const Tensor2& A) { return 0.5 * (A + transpose(A)); }

constexpr double trace(const Tensor2& A) { return A(0, 0) + A(1, 1) + A(2, 2); }

// Σ_i t_iik
constexpr Vec3 trace12(const Tensor3& t) {
    Vec3 r;
    for (int k = 0; k < 3; ++k) r[k] = t(0, 0, k) + t(1, 1, k) + t(2, 2, k);
    return r;
}

constexpr double det(const Tensor2& A) {
    return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
           A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
           A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

// det(A)·A^{-T}
constexpr Tensor2 cofactor(const Tensor2& A) {
    Tensor2 r;
    r(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    r(0, 1) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
    r(0, 2) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
    r(1, 0) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
    r(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
    r(1, 2) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
    r(2, 0) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
    r(2, 1) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
    r(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    return r;
}

// Caller guarantees det(A) != 0; see kinematics for the singular guard.
constexpr Tensor2 inverse(const Tensor2& A) { return transpose(cofactor(A)) / det(A); }

// Rank-generic tensor used by the runtime-checked contraction.
struct DynTensor {
    int rank = 0;
    std::vector<double> data{0.0};

    DynTensor() = default;
    DynTensor(int r, std::vector<double> d);
    static DynTensor zeros(int r);

    explicit DynTensor(double s) : rank(0), data{s} {}
    explicit DynTensor(const Vec3& a) : rank(1), data(a.c.begin(), a.c.end()) {}
    explicit DynTensor(const Tensor2& A) : rank(2), data(A.c.begin(), A.c.end()) {}
    explicit DynTensor(const Tensor3& t) : rank(3), data(t.c.begin(), t.c.end()) {}

    double scalar() const;
    Vec3 vec() const;
    Tensor2 tensor2() const;
    Tensor3 tensor3() const;
};

// Contracts the trailing `order` indices of a with the leading `order`
// indices of b. Throws InvalidArgument if order exceeds either rank or is
// outside 1..3.
DynTensor contract(const DynTensor& a, const DynTensor& b, int order);

}  // namespace sgporo
