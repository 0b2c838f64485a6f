#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "robinlab/geometry.hpp"

namespace robinlab {

using BoundaryFunction = std::function<double(const Point&)>;
using BoundaryKernel = std::function<double(const Point&, const Point&)>;

/// Symbolic boundary operators B on L^2(boundary).
namespace spec {

struct Zero {};

/// (Bf)(x) = beta(x) f(x).
struct Multiplication {
    BoundaryFunction beta;
};

/// (Bf)(x) = int k(x, y) f(y) dsigma(y).
struct Kernel {
    BoundaryKernel k;
};

/// Bf = (int f v dsigma) v; v must have zero mean so that B1 = 0.
struct RankOne {
    BoundaryFunction v;
};

/// Bf = f o R - f o R^*, R the anticlockwise rotation by `angle`.
struct RotationCommutator {
    double angle = 0.0;
};

/// Circle convolution given by its Fourier multipliers: B e_k = q_k e_k.
/// Keys are mode numbers; q_{-k} = q_k is implied when only one of them is given.
struct Convolution {
    std::map<int, double> q_hat;
};

/// Nodal matrix given directly; must be m x m with m the number of boundary nodes.
struct ExplicitMatrix {
    Eigen::MatrixXd entries;
};

}  // namespace spec

using BoundaryOperatorSpec = std::variant<spec::Zero, spec::Multiplication, spec::Kernel, spec::RankOne,
                                          spec::RotationCommutator, spec::Convolution, spec::ExplicitMatrix>;

std::string variant_name(const BoundaryOperatorSpec& s);

/// Nodal realisation of B. The boundary form is b[f, g] = sum_i w_i (B f)_i g_i,
/// so the adjoint in the weighted metric is W^{-1} B^T W.
struct DiscreteBoundaryOperator {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd weights;

    int size() const { return static_cast<int>(weights.size()); }
    Eigen::MatrixXd weighted_adjoint() const;
    bool is_self_adjoint(double rel_tol = 1e-12) const;

    /// b[f, g] = <B f, g> in the weighted boundary inner product (real vectors).
    double form(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

    /// Smallest eigenvalue of (B + B*)/2 in the weighted metric; >= 0 means B + B* is PSD.
    double min_real_part() const;

    static DiscreteBoundaryOperator zero(const Eigen::VectorXd& weights);
};

DiscreteBoundaryOperator discretize_boundary_operator(const BoundaryOperatorSpec& s, const Mesh& mesh);

/// Symbolic adjoint B*; discretizing it agrees with the weighted adjoint of the discretization.
BoundaryOperatorSpec adjoint_spec(const BoundaryOperatorSpec& s, const Mesh& mesh);

struct WeightedNorms {
    double l2 = 0.0;
    double l1 = 0.0;
    double linf = 0.0;
    double l2_on_mean_zero = 0.0;
};

WeightedNorms weighted_norms(const DiscreteBoundaryOperator& op);

/// Entrywise absolute value: the minimal positive S with |B f| <= S |f|.
DiscreteBoundaryOperator modulus_operator(const DiscreteBoundaryOperator& op);

/// Nodal values of a boundary function at the boundary nodes of `mesh`.
Eigen::VectorXd sample_boundary(const Mesh& mesh, const BoundaryFunction& f);

}  // namespace robinlab
