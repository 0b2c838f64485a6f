#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "robinlab/oracles.hpp"
#include "robinlab/spectral.hpp"
#include "support.hpp"

using namespace robinlab;
using namespace robinlab::testing;

TEST(Spectral, NeumannIntervalSpectrum) {
    const SpectralReport r = solve_eigs(interval_problem(200, spec::Zero{}), 4);
    EXPECT_LE(std::abs(r.eigenvalues[0].real()), 1e-8);
    EXPECT_NEAR(r.eigenvalues[1].real(), std::pow(std::numbers::pi / 2, 2), 2e-3);
    EXPECT_NEAR(r.eigenvalues[2].real(), std::pow(std::numbers::pi, 2), 1e-2);
    EXPECT_TRUE(r.self_adjoint);
    EXPECT_TRUE(r.zero_in_spectrum);
    EXPECT_EQ(r.kernel_dimension, 1);
    EXPECT_TRUE(r.kernel_constant);
    for (double res : r.residuals) EXPECT_LT(res, 1e-8);
}

TEST(Spectral, IntervalExampleBelowThreshold) {
    const double b = 0.2;
    const double mu = interval_example_spectrum(b).leading().mu;
    EXPECT_NEAR(mu, 0.46268, 1e-5);
    const SpectralReport r = solve_eigs(interval_problem(400, interval_example(b)), 3);
    EXPECT_NEAR(r.leading_eigenvalue(), -mu * mu, 1e-4);
    EXPECT_NEAR(r.spectral_bound, mu * mu, 1e-4);
    EXPECT_TRUE(r.dominant);
    EXPECT_TRUE(r.simple);
}

TEST(Spectral, LeadingEigenvectorIsCosh) {
    const double b = 0.2;
    const AssembledProblem pb = interval_problem(400, interval_example(b));
    const SpectralReport r = solve_eigs(pb, 1);
    Eigen::VectorXd u = r.real_eigenvector(0, pb.mass);
    if (u.sum() < 0) u = -u;
    const IntervalBranchRoot root = interval_example_spectrum(b).leading();
    Eigen::VectorXd x(pb.size());
    for (int i = 0; i < pb.size(); ++i) x[i] = pb.mesh.vertices[i][0];
    const Eigen::VectorXd phi = interval_eigenfunction(root, x);
    EXPECT_LT((u - phi).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Spectral, RankOneKernelIsConstants) {
    const AssembledProblem pb = disk_problem(6, 32, rank_one_cos());
    const SpectralReport r = solve_eigs(pb, 3);
    EXPECT_LE(r.spectral_bound, 1e-6);
    EXPECT_EQ(r.kernel_dimension, 1);
    EXPECT_TRUE(r.kernel_constant);
    EXPECT_LE(r.kernel_max_deviation, 1e-6);
    const PeripheralVerdict v = classify_peripheral_spectrum(r, pb.boundary);
    EXPECT_TRUE(v.applicable);
    EXPECT_TRUE(v.b_annihilates_one);
    EXPECT_TRUE(v.kernel_criterion_consistent);
    EXPECT_TRUE(v.all_pass);
}

TEST(Spectral, PositiveRobinRemovesZero) {
    const AssembledProblem pb = disk_problem(6, 32, spec::Multiplication{[](const Point&) { return 0.1; }});
    const SpectralReport r = solve_eigs(pb, 3);
    EXPECT_FALSE(r.zero_in_spectrum);
    EXPECT_LT(r.spectral_bound, 0.0);
    const PeripheralVerdict v = classify_peripheral_spectrum(r, pb.boundary);
    EXPECT_FALSE(v.b_annihilates_one);
    EXPECT_TRUE(v.kernel_criterion_consistent);
}

TEST(Spectral, RotationSpectrumIsComplex) {
    const AssembledProblem pb = disk_problem(4, 16, spec::RotationCommutator{std::numbers::pi / 2});
    const SpectralReport r = solve_eigs(pb, pb.size());
    EXPECT_FALSE(r.self_adjoint);
    EXPECT_GT(r.eigenvalues.imag().cwiseAbs().maxCoeff(), 1e-3);
    // Skew boundary part: the spectrum stays in the closed right half plane.
    EXPECT_GE(r.eigenvalues.real().minCoeff(), -1e-10);
}

TEST(Spectral, RayleighQuotientBoundsLeadingEigenvalue) {
    const AssembledProblem pb = interval_problem(100, interval_example(0.2));
    const SpectralReport r = solve_eigs(pb, 1);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(pb.size());
    EXPECT_GE(rayleigh_quotient(pb, one), r.leading_eigenvalue() - 1e-12);
    EXPECT_NEAR(rayleigh_quotient(pb, r.real_eigenvector(0, pb.mass)), r.leading_eigenvalue(), 1e-10);
}

TEST(Growth, ZeroOperatorNeitherGrowsNorDecays) {
    const std::vector<double> ts{1, 2, 4, 8, 10};
    const GrowthComparison g = spectral_bound_vs_growth(interval_problem(50, spec::Zero{}), ts);
    EXPECT_NEAR(g.growth_rate, 0.0, 1e-8);
    EXPECT_NEAR(g.spectral_bound, 0.0, 1e-8);
}

TEST(Growth, IntervalExampleGrowsAtSpectralBound) {
    const std::vector<double> ts{1, 2, 4, 8, 10};
    const GrowthComparison g = spectral_bound_vs_growth(interval_problem(100, interval_example(0.2)), ts);
    EXPECT_GT(g.growth_rate, 0.0);
    EXPECT_TRUE(g.matches);
    EXPECT_NEAR(g.growth_rate, g.spectral_bound, 0.05 * g.spectral_bound);
}

TEST(Growth, IdentityRobinDecays) {
    const std::vector<double> ts{1, 2, 4, 8, 10};
    const GrowthComparison g =
        spectral_bound_vs_growth(interval_problem(100, spec::ExplicitMatrix{Eigen::MatrixXd::Identity(2, 2)}), ts);
    EXPECT_LT(g.spectral_bound, 0.0);
    EXPECT_TRUE(g.matches);
    for (std::size_t i = 1; i < g.samples.size(); ++i) EXPECT_LT(g.samples[i].second, g.samples[i - 1].second);
}

TEST(Spectral, ThresholdEigenvectorIsLinear) {
    const AssembledProblem pb = interval_problem(400, interval_example(1.0 / 3.0));
    const SpectralReport r = solve_eigs(pb, pb.size());
    int best = -1;
    for (int i = 0; i < r.count(); ++i)
        if (best < 0 || std::abs(r.eigenvalues[i]) < std::abs(r.eigenvalues[best])) best = i;
    EXPECT_LT(std::abs(r.eigenvalues[best]), 1e-4);
    const Eigen::VectorXd u = r.real_eigenvector(best, pb.mass);
    Eigen::VectorXd x(pb.size());
    for (int i = 0; i < pb.size(); ++i) x[i] = pb.mesh.vertices[i][0];
    EXPECT_GE(std::abs(u.dot(x)) / (u.norm() * x.norm()), 0.999);
}
