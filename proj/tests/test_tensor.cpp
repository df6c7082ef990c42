#include <gtest/gtest.h>

#include "sgporo/errors.hpp"
#include "sgporo/sampling.hpp"
#include "sgporo/tensor.hpp"

using namespace sgporo;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Contract, IdentityDoubleContractionIsThree) {
    const auto r = contract(DynTensor(Tensor2::identity()), DynTensor(Tensor2::identity()), 2);
    EXPECT_DOUBLE_EQ(r.scalar(), 3.0);
}

TEST(Contract, HyperstressStructureTripleContraction) {
    const Tensor3 t = outer(Tensor2::identity(), Vec3{{1.0, 0.0, 0.0}});
    EXPECT_DOUBLE_EQ(contract(DynTensor(t), DynTensor(t), 3).scalar(), 3.0);
    EXPECT_DOUBLE_EQ(tdot(t, t), 3.0);
}

TEST(Contract, MatchesIndexLoops) {
    Sampler s(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Tensor2 A = s.tensor2(), B = s.tensor2();
        const Tensor3 t = s.tensor3();
        const Vec3 a = s.vec();
        double loop = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) loop += A(i, j) * B(i, j);
        EXPECT_LT(rel(contract(DynTensor(A), DynTensor(B), 2).scalar(), loop), 1e-13);
        EXPECT_LT(rel(ddot(A, B), loop), 1e-13);

        // single contraction A·B
        const Tensor2 AB = contract(DynTensor(A), DynTensor(B), 1).tensor2();
        const Tensor2 AB2 = dot(A, B);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = 0.0;
                for (int k = 0; k < 3; ++k) v += A(i, k) * B(k, j);
                EXPECT_LT(rel(AB(i, j), v), 1e-13);
                EXPECT_LT(rel(AB2(i, j), v), 1e-13);
            }

        // t·a contracts the last index
        const Tensor2 ta = contract(DynTensor(t), DynTensor(a), 1).tensor2();
        const Tensor2 ta2 = dot(t, a);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = 0.0;
                for (int k = 0; k < 3; ++k) v += t(i, j, k) * a[k];
                EXPECT_LT(rel(ta(i, j), v), 1e-13);
                EXPECT_LT(rel(ta2(i, j), v), 1e-13);
            }

        // t:A over the last two indices, A:t over the first two
        const Vec3 tA = contract(DynTensor(t), DynTensor(A), 2).vec();
        const Vec3 At = contract(DynTensor(A), DynTensor(t), 2).vec();
        for (int k = 0; k < 3; ++k) {
            double v1 = 0.0, v2 = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    v1 += t(k, i, j) * A(i, j);
                    v2 += A(i, j) * t(i, j, k);
                }
            EXPECT_LT(rel(tA[k], v1), 1e-13);
            EXPECT_LT(rel(ddot(t, A)[k], v1), 1e-13);
            EXPECT_LT(rel(At[k], v2), 1e-13);
            EXPECT_LT(rel(ddot(A, t)[k], v2), 1e-13);
        }
    }
}

TEST(Contract, RankMismatchThrows) {
    EXPECT_THROW(contract(DynTensor(Vec3{}), DynTensor(Tensor2{}), 2), InvalidArgument);
    EXPECT_THROW(contract(DynTensor(Tensor3{}), DynTensor(Tensor3{}), 4), InvalidArgument);
    EXPECT_THROW(contract(DynTensor(1.0), DynTensor(Vec3{}), 1), InvalidArgument);
    EXPECT_THROW(DynTensor(2, std::vector<double>(4)), InvalidArgument);
}

TEST(Contract, OuterProductRankGrowth) {
    Sampler s(3);
    const Tensor3 t = s.tensor3(), u = s.tensor3();
    const auto r = contract(DynTensor(t), DynTensor(u), 1);
    EXPECT_EQ(r.rank, 4);
    EXPECT_DOUBLE_EQ(r.data[0], t(0, 0, 0) * u(0, 0, 0) + t(0, 0, 1) * u(1, 0, 0) + t(0, 0, 2) * u(2, 0, 0));
}

TEST(Transpose3, PeriodThree) {
    Sampler s(5);
    const Tensor3 t = s.tensor3();
    const Tensor3 r = transpose3(transpose3(transpose3(t)));
    EXPECT_EQ(r.c, t.c);
    EXPECT_NE(transpose3(t).c, t.c);
}

TEST(Transpose3, SingleEntryMoves) {
    Tensor3 t;
    t(0, 1, 2) = 1.0;  // t_123 in one-based indices
    const Tensor3 r = transpose3(t);
    EXPECT_EQ(r(2, 0, 1), 1.0);  // (3,1,2)
    EXPECT_EQ(norm(r), 1.0);
}

TEST(Transpose3, ContractionIdentity) {
    // (t^T : A)·a = A : (t·a)
    Sampler s(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const Tensor3 t = s.tensor3();
        const Tensor2 A = s.tensor2();
        const Vec3 a = s.vec();
        const double lhs = dot(ddot(transpose3(t), A), a);
        double loop = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) loop += A(i, j) * t(i, j, k) * a[k];
        EXPECT_LT(rel(lhs, loop), 1e-13);
        EXPECT_LT(rel(ddot(A, dot(t, a)), loop), 1e-13);
    }
}

TEST(Algebra, TripleProductPermutations) {
    // A:(B·C) = (B^T·A):C = (A·C^T):B
    Sampler s(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const Tensor2 A = s.tensor2(), B = s.tensor2(), C = s.tensor2();
        const double v = ddot(A, dot(B, C));
        EXPECT_LT(rel(ddot(dot(transpose(B), A), C), v), 1e-13);
        EXPECT_LT(rel(ddot(dot(A, transpose(C)), B), v), 1e-13);
    }
}

TEST(Algebra, InverseDeterminantCofactor) {
    Sampler s(29);
    for (int trial = 0; trial < 100; ++trial) {
        Tensor2 F = Tensor2::identity() + s.tensor2(0.3);
        const Tensor2 I = dot(F, inverse(F));
        EXPECT_LT(norm(I - Tensor2::identity()), 1e-13);
        EXPECT_LT(norm(cofactor(F) - det(F) * transpose(inverse(F))), 1e-13);
        EXPECT_NEAR(det(dot(F, F)), det(F) * det(F), 1e-13);
    }
    const Tensor2 Q = s.rotation();
    EXPECT_NEAR(det(Q), 1.0, 1e-14);
    EXPECT_LT(norm(dot(transpose(Q), Q) - Tensor2::identity()), 1e-14);
}

TEST(Algebra, TraceAndSymmetry) {
    Sampler s(31);
    const Tensor2 A = s.tensor2();
    EXPECT_EQ(sym(A).c, transpose(sym(A)).c);
    EXPECT_DOUBLE_EQ(trace(Tensor2::identity()), 3.0);
    const Vec3 c{{1.0, 2.0, 3.0}};
    const Tensor3 t = outer(Tensor2::identity(), c);
    EXPECT_EQ(trace12(t).c, (3.0 * c).c);
}
