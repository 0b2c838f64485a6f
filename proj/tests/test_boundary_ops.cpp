#include <gtest/gtest.h>

#include <numbers>

#include "robinlab/boundary_ops.hpp"
#include "robinlab/errors.hpp"
#include "support.hpp"

using namespace robinlab;
using robinlab::testing::two_point;

TEST(BoundaryOps, ZeroIsZero) {
    for (const Mesh& m : {build_interval_mesh(-1, 1, 10), build_disk_mesh(3, 16)}) {
        const auto b = discretize_boundary_operator(spec::Zero{}, m);
        EXPECT_EQ(b.matrix.cwiseAbs().maxCoeff(), 0.0);
        const WeightedNorms n = weighted_norms(b);
        EXPECT_EQ(n.l2, 0.0);
        EXPECT_EQ(n.l1, 0.0);
        EXPECT_EQ(n.linf, 0.0);
    }
}

TEST(BoundaryOps, ConstantMultiplicationNorms) {
    const Mesh m = build_disk_mesh(3, 16);
    const auto b = discretize_boundary_operator(spec::Multiplication{[](const Point&) { return -1.5; }}, m);
    const WeightedNorms n = weighted_norms(b);
    EXPECT_NEAR(n.l2, 1.5, 1e-12);
    EXPECT_NEAR(n.l1, 1.5, 1e-12);
    EXPECT_NEAR(n.linf, 1.5, 1e-12);
}

TEST(BoundaryOps, ConvolutionNormIsLargestMultiplier) {
    const Mesh m = build_disk_mesh(3, 32);
    const std::map<int, double> q{{0, -0.1}, {1, 0.4}, {3, -0.25}};
    const auto b = discretize_boundary_operator(spec::Convolution{q}, m);
    const WeightedNorms n = weighted_norms(b);
    EXPECT_NEAR(n.l2, 0.4, 1e-12);
    // Young: ||B|| <= sum over k in Z of |q_k|, with q_{-k} = q_k.
    EXPECT_LE(n.l2, 0.1 + 2 * (0.4 + 0.25));
}

TEST(BoundaryOps, ConvolutionActsDiagonallyOnFourierModes) {
    const Mesh m = build_disk_mesh(3, 32);
    const auto b = discretize_boundary_operator(spec::Convolution{{{2, 0.7}}}, m);
    for (int k : {0, 1, 2, 5}) {
        const Eigen::VectorXd e = sample_boundary(m, [k](const Point& p) { return std::cos(k * std::atan2(p[1], p[0])); });
        const double q = k == 2 ? 0.7 : 0.0;
        EXPECT_LT((b.matrix * e - q * e).cwiseAbs().maxCoeff(), 1e-12) << "mode " << k;
    }
}

TEST(BoundaryOps, ModulusIsEntrywise) {
    const Mesh m = build_interval_mesh(-1, 1, 4);
    const auto b = discretize_boundary_operator(spec::ExplicitMatrix{two_point(-2, 1, 1, -2)}, m);
    EXPECT_EQ(modulus_operator(b).matrix, two_point(2, 1, 1, 2));
}

TEST(BoundaryOps, ExplicitMatrixSizeChecked) {
    const Mesh m = build_interval_mesh(-1, 1, 4);
    EXPECT_THROW(discretize_boundary_operator(spec::ExplicitMatrix{Eigen::MatrixXd::Identity(3, 3)}, m), InvalidArgument);
}

TEST(BoundaryOps, RankOneAnnihilatesConstantsAndIsSelfAdjoint) {
    const Mesh m = build_disk_mesh(3, 32);
    const auto b = discretize_boundary_operator(robinlab::testing::rank_one_cos(), m);
    EXPECT_LT((b.matrix * Eigen::VectorXd::Ones(b.size())).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_TRUE(b.is_self_adjoint());
    EXPECT_GE(b.min_real_part(), -1e-12);
}

TEST(BoundaryOps, RotationCommutatorIsSkew) {
    const Mesh m = build_disk_mesh(3, 32);
    const auto b = discretize_boundary_operator(spec::RotationCommutator{std::numbers::pi / 2}, m);
    EXPECT_LT((b.weighted_adjoint() + b.matrix).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(b.min_real_part(), 0.0, 1e-12);
}

TEST(BoundaryOps, KernelAdjointMatchesWeightedAdjoint) {
    const Mesh m = build_disk_mesh(3, 16);
    const spec::Kernel k{[](const Point& x, const Point& y) { return std::exp(-(x[0] - y[0]) * (x[0] - y[0])) * (1 + y[1]); }};
    const auto b = discretize_boundary_operator(k, m);
    const auto bstar = discretize_boundary_operator(adjoint_spec(k, m), m);
    EXPECT_LT((bstar.matrix - b.weighted_adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_FALSE(b.is_self_adjoint());
}

TEST(BoundaryOps, FormUsesWeights) {
    const Mesh m = build_disk_mesh(3, 16);
    const auto b = discretize_boundary_operator(spec::Multiplication{[](const Point&) { return 1.0; }}, m);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(b.size());
    EXPECT_NEAR(b.form(one, one), 2 * std::numbers::pi, 1e-13);
}
