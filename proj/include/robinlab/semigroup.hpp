#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/assembly.hpp"

namespace robinlab {

/// Dense exponentials are refused above this many vertices.
inline constexpr int kDenseVertexBudget = 2000;

enum class TimeScheme { ImplicitEuler, CrankNicolson };

struct EvolutionState {
    double t = 0.0;
    Eigen::VectorXd u;
    const AssembledProblem* problem = nullptr;
};

/// One step of M u' + A_B u = 0.
EvolutionState step(const EvolutionState& state, double dt, TimeScheme scheme);

/// Fixed-dt stepper that factors the step matrix once.
class Stepper {
public:
    Stepper(const AssembledProblem& problem, double dt, TimeScheme scheme);
    Eigen::VectorXd advance(const Eigen::VectorXd& u) const;
    double dt() const { return dt_; }

private:
    double dt_;
    Eigen::MatrixXd rhs_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Exact discrete semigroup E(t) = exp(-t M^{-1} A_B).
///
/// When A_B is symmetric the generalized eigendecomposition is cached and reused
/// for every t; otherwise each call runs a Pade scaling-and-squaring exponential.
class Propagator {
public:
    explicit Propagator(const AssembledProblem& problem);

    Eigen::MatrixXd at(double t) const;
    bool self_adjoint() const { return self_adjoint_; }
    int size() const { return static_cast<int>(mass_.rows()); }

    /// ||E(t)||_{L^2 -> L^2} in the M inner product.
    double m_norm(double t) const;

    /// max_i || e_i^T E(t) M^{-1/2} ||_2, the nodal sup-norm proxy of ||E(t)||_{L^2 -> L^inf}.
    double l2_to_linf(double t) const;

private:
    bool self_adjoint_ = false;
    Eigen::MatrixXd mass_;
    Eigen::MatrixXd mass_chol_;  // lower factor L with M = L L^T
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;  // M-orthonormal
    Eigen::MatrixXd generator_;     // M^{-1} A_B
};

Eigen::MatrixXd matrix_semigroup(const AssembledProblem& problem, double t);

/// ||X||_M = ||L^T X L^{-T}||_2 for M = L L^T.
double m_weighted_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mass);

/// Solves (lambda M + A_B) u = M f.
Eigen::VectorXd resolvent(const AssembledProblem& problem, double lambda, const Eigen::VectorXd& f);

double l2_to_linf_norm(const AssembledProblem& problem, double t);

struct UltraFit {
    std::vector<std::pair<double, double>> samples;  // (t, norm)
    double c = 0.0;
    double mu = 0.0;
    double r_squared = 0.0;
    double resolution_floor = 0.0;  // 4 h^2
};

/// Least-squares fit of log ||E(t)||_{2->inf} = log c - (mu/4) log t.
UltraFit fit_ultracontractivity(const AssembledProblem& problem, std::span<const double> ts);

/// Smallest t admitted in ultracontractivity fits: 4 h^2 with h the longest edge.
double resolution_floor(const Mesh& mesh);

/// Construction of a positive dominating boundary operator B2 for B.
struct DominatingConstruction {
    DiscreteBoundaryOperator b1;  // -|B|
    double beta_aux = 0.0;        // -4 ||B1||_{inf->inf}
    double lambda = 0.0;
    Eigen::VectorXd u;         // lambda R(lambda, -L_beta) 1, nodal values in [1/2, 2]
    Eigen::VectorXd h;         // boundary weight with <gamma u, h> = 1
    Eigen::VectorXd g;         // -beta gamma u + B1 gamma u >= 0
    DiscreteBoundaryOperator b2;  // B1 f - <f, h> g

    // Postcondition evidence.
    double domination_margin = 0.0;       // min entry of (-B2) - (-B1); >= 0 required
    double b1_min_entry = 0.0;            // min entry of -B1; >= 0 required
    double boundary_equality_residual = 0.0;  // ||B2 gamma u - beta gamma u||_inf
    double supersolution_min = 0.0;       // min_i (lambda M u + A_{B2} u)_i
    bool postconditions_hold = false;
};

DominatingConstruction build_dominating_operator(const DiscreteBoundaryOperator& b, const AssembledProblem& problem);

struct DominationWitness {
    double t = 0.0;
    int trial = -1;  // random trial index; -1 for the positivity and hat-function checks
    int basis = -1;  // column j when the witness is f = e_j
    int node = -1;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct DominationReport {
    bool holds = true;
    bool dominator_positive = true;
    double worst_excess = 0.0;  // max over checks of |E_B f| - E_Bt |f|
    std::optional<DominationWitness> witness;
    std::uint64_t seed = 0;
};

/// Checks |E_B(t) f| <= E_Bt(t) |f| + 1e-9 for random f and every hat function, and positivity of E_Bt(t).
DominationReport check_domination(const AssembledProblem& problem_b, const AssembledProblem& problem_bt,
                                  std::span<const double> ts, int trials, std::uint64_t seed = 7);

/// Smallest c_t with |E(t) f| <= c_t phi for all ||f||_2 <= 1; infinite if phi is not positive.
double intrinsic_ultracontractivity_constant(const Propagator& propagator, double t, const Eigen::VectorXd& phi,
                                             const Eigen::MatrixXd& mass);

}  // namespace robinlab
