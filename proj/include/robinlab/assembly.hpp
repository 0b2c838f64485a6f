#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "robinlab/boundary_ops.hpp"
#include "robinlab/geometry.hpp"

namespace robinlab {

/// Diffusion coefficient A(x). In 1D only the (0,0) entry is used.
struct CoefficientField {
    std::function<Eigen::Matrix2d(const Point&)> evaluator;
    double declared_alpha = 1.0;
    bool symmetric = true;
    bool g_invariant = true;

    static CoefficientField identity();
    static CoefficientField constant(double a);
    static CoefficientField constant_matrix(const Eigen::Matrix2d& a, double declared_alpha);

    /// A^T, used for the adjoint problem.
    CoefficientField transposed() const;
};

enum class MassLumping { Lumped, Consistent };

struct AssemblyOptions {
    MassLumping mass = MassLumping::Lumped;
    bool compute_garding = true;
};

/// H^1-ellipticity pair: sym(A_B) + omega M - c G >= 0, G the Laplacian stiffness.
struct GardingPair {
    double c = 0.0;
    double omega = 0.0;
    double certified_min_eigenvalue = 0.0;
};

/// P1 matrices of the form a_B[u, v] = int A grad u . grad v + <B gamma u, gamma v>.
///
/// `form` is row-indexed by the test function: form(i, j) = a_B[phi_j, phi_i], so
/// v^T form u = a_B[u, v] for nodal vectors u, v.
struct AssembledProblem {
    Mesh mesh;
    CoefficientField coefficient;
    DiscreteBoundaryOperator boundary;
    Eigen::MatrixXd mass;           // M
    Eigen::MatrixXd stiffness;      // K, with coefficient A
    Eigen::MatrixXd gradient_gram;  // ||grad u||^2 = u^T G u
    Eigen::MatrixXd trace;          // gamma_h, boundary_count x vertex_count selector
    Eigen::MatrixXd form;           // A_B = K + gamma^T M_d B_h gamma
    std::optional<GardingPair> garding;

    int size() const { return static_cast<int>(form.rows()); }
    const Eigen::VectorXd& boundary_mass() const { return boundary.weights; }
    bool is_symmetric(double rel_tol = 1e-12) const;
    /// 1^T M u, the discrete integral of u.
    double total_mass(const Eigen::VectorXd& u) const { return (mass * u).sum(); }
};

AssembledProblem assemble(const Mesh& mesh, const CoefficientField& a, const DiscreteBoundaryOperator& b,
                          AssemblyOptions options = {});

/// Same mesh and coefficient with a different boundary operator (reuses M, K).
AssembledProblem with_boundary(const AssembledProblem& base, const DiscreteBoundaryOperator& b,
                               bool compute_garding = true);

/// c = alpha/2 and the smallest omega >= 0 with sym(A_B) + omega M - c G PSD (to -1e-10).
GardingPair garding_constants(const AssembledProblem& problem);

struct LocalityReport {
    bool is_local = true;
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> witness;  // (u, v) with disjoint supports
    double witness_value = 0.0;                                           // a_B[u, v]
};

/// Looks for hat-function combinations with disjoint supports on which a_B is nonzero.
LocalityReport check_locality(const AssembledProblem& problem, int trials, std::uint64_t seed = 1);

/// Coordinate text export: one "i j value" line per nonzero entry.
void write_coo(std::ostream& os, const Eigen::MatrixXd& m, double drop_tol = 0.0);

}  // namespace robinlab
