#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/assembly.hpp"
#include "robinlab/geometry.hpp"

namespace robinlab {

enum class GroupKind { Reflection1D, CyclicRotation, DihedralOnDisk };

struct GroupSpec {
    GroupKind kind = GroupKind::Reflection1D;
    int n = 2;  // rotation count for CyclicRotation(n) and DihedralOnDisk(n)
};

std::string group_name(const GroupSpec& g);

/// Exact permutation action of a finite group on mesh vertices and boundary nodes.
///
/// vertex_perms[g][i] is the index of the image g(x_i). The induced operator is
/// (T_g u)(x) = u(g^{-1} x), i.e. (T_g u)[vertex_perms[g][i]] = u[i].
struct GroupAction {
    GroupSpec group;
    std::vector<std::vector<int>> vertex_perms;
    std::vector<std::vector<int>> boundary_perms;

    int order() const { return static_cast<int>(vertex_perms.size()); }
    Eigen::MatrixXd vertex_operator(int g) const;    // T_g
    Eigen::MatrixXd boundary_operator(int g) const;  // S_g
};

/// Throws InvalidArgument naming the first unmatched vertex (or cell) when the
/// mesh is not invariant under the group.
GroupAction build_group_action(const Mesh& mesh, const GroupSpec& group);

struct SymmetricProjection {
    Eigen::MatrixXd p;  // vertex average (1/|G|) sum T_g
    Eigen::MatrixXd q;  // boundary average (1/|G|) sum S_g
};

SymmetricProjection symmetric_projection(const GroupAction& action);

struct EquivarianceReport {
    bool equivariant = false;
    double defect = 0.0;                  // max_g ||op T_g - T_g op||
    double projection_commutator = 0.0;  // ||op P - P op||
    double op_norm = 0.0;
};

/// Acts with T_g when op is vertex sized and with S_g when it is boundary sized.
/// Norms are spectral norms in the diagonal metric `weights` (Euclidean if absent).
EquivarianceReport check_equivariance(const Eigen::MatrixXd& op, const GroupAction& action,
                                      const std::optional<Eigen::VectorXd>& weights = {});

struct ScalarCommutantVerdict {
    bool applicable = false;
    bool all_scalar = false;
    double max_deviation = 0.0;  // ||X - (tr X / 2) I|| over the projected samples
    bool skew_generator_commutes = false;
    bool skew_generator_scalar = true;
    int trials = 0;
};

/// Symmetric 2x2 matrices commuting with the rotation by 2 pi / n are scalar for n >= 3.
ScalarCommutantVerdict scalar_commutant_check(int n, int trials, std::uint64_t seed = 5);

struct BetaConstant {
    double c0 = 0.0;  // Poincare constant on the anti-invariant subspace
    double c1 = 0.0;  // trace constant against the full H^1 norm
    double c = 0.0;   // (c0 + 1) c1
    double beta = 0.0;
};

BetaConstant beta_constant(const AssembledProblem& problem, const GroupAction& action);

struct InvarianceVerdict {
    bool applicable = false;
    std::string failed_hypothesis;  // empty when applicable

    // Hypotheses with margins.
    bool self_adjoint = false;
    double equivariance_defect = 0.0;
    double mean_form = 0.0;  // <B 1, 1>_W, must be < 0
    double mean_zero_norm = 0.0;
    BetaConstant beta;

    // Observations, recorded whether or not the hypotheses hold.
    double spectral_bound = 0.0;
    int leading_multiplicity = 0;
    double max_anti_invariant_norm = 0.0;  // max ||(I - P) u||_M over the leading eigenspace
    bool invariant_observed = false;
    double min_nodal_value = 0.0;  // of the M-normalised leading eigenvector
    bool positive_observed = false;

    bool conclusion_holds = false;  // s > 0 and invariance, meaningful when applicable
};

InvarianceVerdict verify_invariant_leading_eigenfunction(const AssembledProblem& problem, const GroupAction& action);

}  // namespace robinlab
