#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_ops.hpp"

namespace robinlab {

struct MatrixEntry {
    int row = -1;
    int col = -1;
    double value = 0.0;
};

struct BoundaryPositivity {
    bool positive = true;
    std::optional<MatrixEntry> witness;                  // negative off-diagonal entry of -B
    std::vector<std::pair<double, double>> expm_min_entry;  // (t, min entry of exp(-t B)) at t = 0.1, 1
};

/// exp(-tB) is positive for all t iff -B (measure-preserving basis) is Metzler.
BoundaryPositivity boundary_semigroup_positive(const DiscreteBoundaryOperator& b);

struct BeurlingDenyWitness {
    Eigen::VectorXd f;          // boundary nodal values
    double value = 0.0;         // b[f+, f-]
    std::string candidate;      // which search stage produced it
};

/// Searches f with b[f+, f-] > 0. `hint` supplies the defining function for RankOne.
std::optional<BeurlingDenyWitness> beurling_deny_violation(const DiscreteBoundaryOperator& b, const Mesh& mesh,
                                                           const BoundaryOperatorSpec* hint, int trials,
                                                           std::uint64_t seed = 11);

/// Quadrant indicator on the disk boundary: +1 on [a pi/2, (a+1) pi/2), -1 on quadrant `neg`.
Eigen::VectorXd quadrant_function(const Mesh& mesh, int pos, int neg);

struct BulkBoundaryVerdict {
    bool bulk_positive = true;
    bool boundary_positive = true;
    bool agree = true;
    double min_entry = 0.0;      // most negative (relative) entry seen
    double t_at_min = 0.0;
    std::optional<MatrixEntry> boundary_witness;
};

BulkBoundaryVerdict bulk_equals_boundary_positivity(const AssembledProblem& problem, std::span<const double> ts);

/// Margins below this count as non-positive; they are at rounding level for O(1) kernels.
inline constexpr double kMarginFloor = 1e-10;

struct MarginSample {
    double t = 0.0;
    double delta = 0.0;  // min_{i,j} [E(t) phi_j]_i / int phi_j
    int node = -1;
    int basis = -1;
};

struct PositivityCertificate {
    bool normalized = false;
    double spectral_bound = 0.0;  // used for the e^{-s t} rescaling when normalized
    double t0 = 0.0;
    double delta = 0.0;
    std::vector<double> grid;  // ascending sample times
    std::vector<MarginSample> margins;
    std::vector<Eigen::VectorXd> basis_evidence;  // per t >= t0: min_i margin for each hat function
};

struct EventualPositivityNotFound {
    bool normalized = false;
    double t_max = 0.0;
    MarginSample witness;  // most violating (t, node, basis)
    std::vector<MarginSample> margins;
};

using EventualPositivityResult = std::variant<PositivityCertificate, EventualPositivityNotFound>;

/// Scans t = t_max 2^{-j}, j < grid_points, for a tail of positive hat-basis margins.
EventualPositivityResult find_eventual_positivity(const AssembledProblem& problem, double t_max, int grid_points,
                                                  bool normalize, std::optional<double> spectral_bound = {});

struct CertificateCheck {
    double max_violation = 0.0;  // max over samples of delta int f - min_i (E f)_i
    bool passes = false;
    std::vector<double> times;
};

/// Re-checks a certificate at random times in [t0, 2 t0] on random non-negative vectors.
CertificateCheck revalidate_certificate(const AssembledProblem& problem, const PositivityCertificate& cert,
                                        int n_times = 5, int n_vectors = 20, std::uint64_t seed = 3);

struct RankOneProfile {
    double eigenvalue = 0.0;
    Eigen::VectorXd u;  // right eigenvector, M-normalised with positive mean
    Eigen::VectorXd v;  // left eigenvector with <u, M v> = 1
    double residual = 0.0;        // ||e^{s t} E(t) - u (M v)^T||_M
    double expected_bound = 0.0;  // e^{-gap t / 2}
};

RankOneProfile asymptotic_rank_one_profile(const AssembledProblem& problem, double t_large);

}  // namespace robinlab
