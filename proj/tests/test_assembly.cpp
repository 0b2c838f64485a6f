#include <gtest/gtest.h>

#include <random>

#include "robinlab/assembly.hpp"
#include "robinlab/errors.hpp"
#include "support.hpp"

using namespace robinlab;
using namespace robinlab::testing;

TEST(Assembly, TwoCellNeumannStiffness) {
    const AssembledProblem pb = interval_problem(2, spec::Zero{});
    Eigen::MatrixXd k(3, 3);
    k << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    EXPECT_LT((pb.stiffness - k).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((pb.stiffness * Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(pb.total_mass(Eigen::VectorXd::Ones(3)), 2.0, 1e-15);
}

TEST(Assembly, ZeroBoundaryGivesStiffness) {
    const AssembledProblem pb = disk_problem(3, 16, spec::Zero{});
    EXPECT_EQ(pb.form, pb.stiffness);
}

TEST(Assembly, ExplicitMatrixOnlyTouchesEndpoints) {
    const double b = 0.2;
    const AssembledProblem pb = interval_problem(10, interval_example(b));
    const Eigen::MatrixXd d = pb.form - pb.stiffness;
    int nonzero = 0;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            if (d(i, j) != 0.0) ++nonzero;
    EXPECT_EQ(nonzero, 4);
    EXPECT_NEAR(d(0, 0), -2 * b, 1e-15);
    EXPECT_NEAR(d(0, 10), b, 1e-15);
    EXPECT_NEAR(d(10, 0), b, 1e-15);
    EXPECT_NEAR(d(10, 10), -2 * b, 1e-15);
}

TEST(Assembly, DiskStiffnessIntegratesGradients) {
    // u = x: ||grad u||^2 = area of the mesh polygon.
    const AssembledProblem pb = disk_problem(4, 32, spec::Zero{});
    Eigen::VectorXd x(pb.size());
    for (int v = 0; v < pb.size(); ++v) x[v] = pb.mesh.vertices[v][0];
    EXPECT_NEAR(x.dot(pb.stiffness * x), pb.mesh.volume(), 1e-12);
}

TEST(Garding, NeumannNeedsNoShift) {
    const GardingPair g = garding_constants(interval_problem(20, spec::Zero{}, false));
    EXPECT_DOUBLE_EQ(g.c, 0.5);
    EXPECT_EQ(g.omega, 0.0);
    EXPECT_GE(g.certified_min_eigenvalue, -1e-10);
}

TEST(Garding, NegativeRobinNeedsPositiveShift) {
    const AssembledProblem pb = interval_problem(20, spec::Multiplication{[](const Point&) { return -0.5; }}, false);
    const GardingPair g = garding_constants(pb);
    EXPECT_GT(g.omega, 0.0);
    EXPECT_GE(g.certified_min_eigenvalue, -1e-10);
    // Minimality up to the bisection tolerance: a visibly smaller shift fails.
    const Eigen::MatrixXd sym = 0.5 * (pb.form + pb.form.transpose());
    const Eigen::MatrixXd below = sym + (g.omega - 1e-4) * pb.mass - g.c * pb.gradient_gram;
    EXPECT_LT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(below).eigenvalues()[0], 0.0);
}

TEST(Garding, AccretiveOperatorGivesAccretiveForm) {
    const AssembledProblem pb = disk_problem(4, 16, rank_one_cos());
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd u(pb.size());
        for (auto& x : u) x = normal(rng);
        EXPECT_GE(u.dot(pb.form * u), -1e-12);
    }
}

TEST(Locality, MultiplicationAndZeroAreLocal) {
    EXPECT_TRUE(check_locality(disk_problem(3, 16, spec::Zero{}), 50).is_local);
    EXPECT_TRUE(check_locality(disk_problem(3, 16, spec::Multiplication{[](const Point& p) { return 1 + p[0]; }}), 50).is_local);
}

TEST(Locality, RankOneIsNonLocalWithWitness) {
    const AssembledProblem pb = disk_problem(3, 16, rank_one_cos());
    const LocalityReport r = check_locality(pb, 50);
    ASSERT_FALSE(r.is_local);
    ASSERT_TRUE(r.witness);
    const auto& [u, v] = *r.witness;
    EXPECT_EQ(u.cwiseProduct(v).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(v.dot(pb.form * u), r.witness_value, 1e-14);
    EXPECT_NE(r.witness_value, 0.0);
}

TEST(Assembly, RejectsNonElliptic) {
    EXPECT_THROW(CoefficientField::constant(-1.0), InvalidArgument);
}

TEST(Garding, AgreesWithBisectionOracle) {
    const AssembledProblem pb = interval_problem(30, spec::Multiplication{[](const Point& p) { return -0.5 + 0.3 * p[0]; }}, false);
    const GardingPair g = garding_constants(pb);
    const Eigen::MatrixXd base = 0.5 * (pb.form + pb.form.transpose()) - g.c * pb.gradient_gram;
    auto psd = [&](double omega) {
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(base + omega * pb.mass, Eigen::EigenvaluesOnly).eigenvalues()[0] >= -1e-10;
    };
    double lo = 0.0, hi = 1.0;
    while (!psd(hi)) hi *= 2;
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (psd(mid) ? hi : lo) = mid;
    }
    EXPECT_NEAR(g.omega, hi, 1e-6);
}
