#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace robinlab {

/// Branch functions of the interval model with B = b [[-2, 1], [1, -2]] on (-1, 1):
/// mu^2 is an eigenvalue of -L_B iff f1(mu) = b or f2(mu) = b.
double f1(double mu);
double f2(double mu);  // f2(0) = 1/3 by continuity

enum class Branch { F1, F2, Threshold };
enum class EigenfunctionShape { Cosh, Sinh, Linear };

struct IntervalBranchRoot {
    Branch branch = Branch::F1;
    double b = 0.0;
    double mu = 0.0;
    double lambda = 0.0;  // eigenvalue mu^2 of -L_B
    EigenfunctionShape eigenfunction = EigenfunctionShape::Cosh;
    double coefficient = 0.0;  // L^2(-1, 1) normalising factor
    int multiplicity = 1;      // 2 at the branch crossing
};

struct IntervalSpectrum {
    double b = 0.0;
    std::vector<IntervalBranchRoot> roots;  // ascending mu
    bool double_root = false;

    /// Root with the largest mu, which gives s(-L_B).
    const IntervalBranchRoot& leading() const { return roots.back(); }
};

IntervalSpectrum interval_example_spectrum(double b);

/// Nodal values of the normalised eigenfunction of `root` at the points `x`.
Eigen::VectorXd interval_eigenfunction(const IntervalBranchRoot& root, const Eigen::VectorXd& x);

/// arctanh(1/sqrt(3)), where f1 and f2 cross.
double crossing_point();

/// Bisection on f1 - f2 over [lo, hi].
double detect_crossing(double lo = 0.1, double hi = 2.0);

struct BranchRow {
    double mu = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

std::vector<BranchRow> branch_table(double mu_max, double step);

/// Both branches strictly increasing on the grid (0, mu_max].
bool branches_strictly_increasing(double mu_max = 10.0, double step = 1e-3);

/// Modified Bessel functions by power series.
double bessel_i0(double x);
double bessel_i1(double x);

/// |sqrt(s) I1(sqrt(s)) / I0(sqrt(s)) + q0|, zero when s(-L_B) = s for the mode-0 problem.
double bessel_condition_residual(double s, double q0);

struct ModeRow {
    int k = 0;
    double q = 0.0;
    double lambda_min = 0.0;  // smallest eigenvalue of the radial pencil
};

struct DiskModeTable {
    std::vector<ModeRow> rows;  // k = -k_max .. k_max
    double spectral_bound = 0.0;
    int argmin_mode = 0;
    Eigen::VectorXd radii;
    Eigen::VectorXd eigenfunction;  // radial profile of the minimising mode, max-normalised positive
};

/// Per-Fourier-mode radial P1 solver for the disk with a convolution boundary operator.
DiskModeTable disk_mode_spectrum(const std::map<int, double>& q_hat, int k_max, int n_radial);

struct ConvergenceRow {
    int resolution = 0;
    double h = 0.0;
    double value = 0.0;
    double oracle = 0.0;
    double error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> orders;  // between consecutive rows
    double min_order = 0.0;
    bool order_ok = false;  // min_order >= 1.8
};

/// FEM s(-L_B) on (-1, 1) with n cells against the interval oracle.
ConvergenceTable interval_oracle_vs_fem(double b, const std::vector<int>& resolutions);

/// FEM s(-L_B) on disk(n_r, n_theta) against the mode solver.
ConvergenceTable disk_oracle_vs_fem(const std::map<int, double>& q_hat, const std::vector<std::pair<int, int>>& meshes);

}  // namespace robinlab
