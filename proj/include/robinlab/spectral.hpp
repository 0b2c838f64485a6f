#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/assembly.hpp"

namespace robinlab {

/// Spectrum of the pencil A_B u = lambda M u, i.e. of L_B; the spectral bound of
/// -L_B is s = -min Re(lambda).
struct SpectralReport {
    Eigen::VectorXcd eigenvalues;   // ascending real part; first `count` of the full spectrum
    Eigen::MatrixXcd eigenvectors;  // M-normalised columns
    std::vector<double> residuals;  // ||A_B u - lambda M u|| / ||u||
    bool self_adjoint = false;
    double spectral_bound = 0.0;
    bool dominant = false;
    bool simple = false;
    bool zero_in_spectrum = false;
    int kernel_dimension = 0;
    bool kernel_constant = false;
    double kernel_max_deviation = 0.0;
    double min_nonleading_gap = 0.0;  // Re(lambda_1) - Re(lambda_0) over the full spectrum

    int count() const { return static_cast<int>(eigenvalues.size()); }
    /// Real eigenvector i (phase-aligned real part), M-normalised.
    Eigen::VectorXd real_eigenvector(int i, const Eigen::MatrixXd& mass) const;
    double leading_eigenvalue() const { return eigenvalues(0).real(); }
};

/// Dense generalized eigensolve; the full spectrum drives the dominance flags,
/// `count` limits what is stored.
SpectralReport solve_eigs(const AssembledProblem& problem, int count);

double rayleigh_quotient(const AssembledProblem& problem, const Eigen::VectorXd& u);

struct PeripheralVerdict {
    bool applicable = false;            // B + B* PSD in the weighted metric
    double accretivity_margin = 0.0;    // min eigenvalue of (B + B*)/2
    bool spectral_bound_nonpositive = false;
    bool imaginary_axis_only_zero = false;
    bool zero_in_spectrum = false;
    bool kernel_simple = false;
    bool kernel_constant = false;
    bool b_annihilates_one = false;
    double b_one_residual = 0.0;  // ||B_h 1||_inf
    bool kernel_criterion_consistent = false;  // 0 in spectrum <=> B_h 1 = 0
    bool all_pass = false;
};

PeripheralVerdict classify_peripheral_spectrum(const SpectralReport& report, const DiscreteBoundaryOperator& b);

struct GrowthComparison {
    std::vector<std::pair<double, double>> samples;  // (t, ||E(t)||_M)
    double growth_rate = 0.0;
    double spectral_bound = 0.0;
    bool matches = false;
};

/// Growth rate from the slope of log ||E(t)||_M over the last decade of `ts`,
/// compared against s(-L_B) at 5 % relative tolerance.
GrowthComparison spectral_bound_vs_growth(const AssembledProblem& problem, std::span<const double> ts);

}  // namespace robinlab
