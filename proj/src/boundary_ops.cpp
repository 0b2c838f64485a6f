#include "robinlab/boundary_ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "robinlab/errors.hpp"

namespace robinlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::VectorXd weights_of(const Mesh& mesh) {
    return Eigen::Map<const Eigen::VectorXd>(mesh.boundary_weights.data(),
                                             static_cast<Eigen::Index>(mesh.boundary_weights.size()));
}

const Point& boundary_point(const Mesh& mesh, int k) { return mesh.vertices[mesh.boundary_nodes[k]]; }

/// Rotation by `angle` expressed as a shift in boundary positions.
int rotation_steps(const Mesh& mesh, double angle) {
    if (!mesh.disk) throw InvalidArgument("RotationCommutator: requires a disk mesh");
    const int n = mesh.disk->n_theta;
    const double steps = angle * n / (2.0 * std::numbers::pi);
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9)
        throw InvalidArgument("RotationCommutator: angle is not a symmetry of the mesh (n_theta = " +
                              std::to_string(n) + ")");
    return static_cast<int>(((static_cast<long>(rounded) % n) + n) % n);
}

/// Symmetric multiplier table q_0..q_{n/2} for a circle with n nodes.
std::vector<double> multipliers(const spec::Convolution& c, int n) {
    std::vector<double> q(static_cast<std::size_t>(n / 2 + 1), 0.0);
    std::vector<bool> seen(q.size(), false);
    for (const auto& [k, value] : c.q_hat) {
        if (!std::isfinite(value)) throw InvalidArgument("Convolution: non-finite Fourier coefficient");
        const int a = std::abs(k);
        if (a > n / 2)
            throw InvalidArgument("Convolution: mode " + std::to_string(k) + " exceeds the resolvable n_theta/2 = " +
                                  std::to_string(n / 2));
        if (seen[a] && q[a] != value)
            throw InvalidArgument("Convolution: q_" + std::to_string(a) + " and q_-" + std::to_string(a) +
                                  " differ; a real kernel needs q_k = q_-k");
        q[a] = value;
        seen[a] = true;
    }
    return q;
}

}  // namespace

std::string variant_name(const BoundaryOperatorSpec& s) {
    return std::visit(overloaded{[](const spec::Zero&) { return std::string("zero"); },
                                 [](const spec::Multiplication&) { return std::string("multiplication"); },
                                 [](const spec::Kernel&) { return std::string("kernel"); },
                                 [](const spec::RankOne&) { return std::string("rank_one"); },
                                 [](const spec::RotationCommutator&) { return std::string("rotation_commutator"); },
                                 [](const spec::Convolution&) { return std::string("convolution"); },
                                 [](const spec::ExplicitMatrix&) { return std::string("explicit_matrix"); }},
                      s);
}

Eigen::MatrixXd DiscreteBoundaryOperator::weighted_adjoint() const {
    return weights.cwiseInverse().asDiagonal() * matrix.transpose() * weights.asDiagonal();
}

bool DiscreteBoundaryOperator::is_self_adjoint(double rel_tol) const {
    const Eigen::MatrixXd wb = weights.asDiagonal() * matrix;
    const double scale = std::max(1.0, wb.cwiseAbs().maxCoeff());
    return (wb - wb.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double DiscreteBoundaryOperator::form(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return (matrix * f).cwiseProduct(weights).dot(g);
}

double DiscreteBoundaryOperator::min_real_part() const {
    const Eigen::VectorXd sw = weights.cwiseSqrt();
    const Eigen::MatrixXd x = sw.asDiagonal() * matrix * sw.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd sym = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DiscreteBoundaryOperator DiscreteBoundaryOperator::zero(const Eigen::VectorXd& weights) {
    return {Eigen::MatrixXd::Zero(weights.size(), weights.size()), weights};
}

Eigen::VectorXd sample_boundary(const Mesh& mesh, const BoundaryFunction& f) {
    Eigen::VectorXd v(mesh.boundary_count());
    for (int k = 0; k < mesh.boundary_count(); ++k) v[k] = f(boundary_point(mesh, k));
    return v;
}

DiscreteBoundaryOperator discretize_boundary_operator(const BoundaryOperatorSpec& s, const Mesh& mesh) {
    const int m = mesh.boundary_count();
    const Eigen::VectorXd w = weights_of(mesh);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);

    std::visit(
        overloaded{
            [](const spec::Zero&) {},
            [&](const spec::Multiplication& op) {
                if (!op.beta) throw InvalidArgument("Multiplication: missing boundary function");
                const Eigen::VectorXd beta = sample_boundary(mesh, op.beta);
                if (!beta.allFinite()) throw InvalidArgument("Multiplication: beta is not bounded on the boundary");
                b = beta.asDiagonal();
            },
            [&](const spec::Kernel& op) {
                if (!op.k) throw InvalidArgument("Kernel: missing kernel function");
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) b(i, j) = op.k(boundary_point(mesh, i), boundary_point(mesh, j)) * w[j];
                if (!b.allFinite()) throw InvalidArgument("Kernel: kernel is not bounded on the boundary");
            },
            [&](const spec::RankOne& op) {
                if (!op.v) throw InvalidArgument("RankOne: missing boundary function");
                const Eigen::VectorXd v = sample_boundary(mesh, op.v);
                const double mean = w.dot(v);
                if (std::abs(mean) > 1e-10 * std::max(1.0, w.dot(v.cwiseAbs())))
                    throw InvalidArgument("RankOne: v must have zero boundary mean (got " + std::to_string(mean) + ")");
                b = v * v.cwiseProduct(w).transpose();
            },
            [&](const spec::RotationCommutator& op) {
                const int s_steps = rotation_steps(mesh, op.angle);
                if (mesh.disk->n_theta % 4 != 0)
                    throw InvalidArgument("RotationCommutator: n_theta must be divisible by 4");
                for (int k = 0; k < m; ++k) {
                    b(k, (k + s_steps) % m) += 1.0;
                    b(k, (k - s_steps + m) % m) -= 1.0;
                }
            },
            [&](const spec::Convolution& op) {
                if (!mesh.disk) throw InvalidArgument("Convolution: requires a disk mesh");
                const int n = mesh.disk->n_theta;
                const auto q = multipliers(op, n);
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < m; ++j) {
                        const double delta = 2.0 * std::numbers::pi * (i - j) / n;
                        double sum = q[0];
                        for (int k = 1; k < n / 2; ++k) sum += 2.0 * q[k] * std::cos(k * delta);
                        sum += q[n / 2] * std::cos((n / 2) * delta);
                        b(i, j) = sum / n;
                    }
                }
            },
            [&](const spec::ExplicitMatrix& op) {
                if (op.entries.rows() != m || op.entries.cols() != m)
                    throw InvalidArgument("ExplicitMatrix: expected " + std::to_string(m) + "x" + std::to_string(m) +
                                          " entries, got " + std::to_string(op.entries.rows()) + "x" +
                                          std::to_string(op.entries.cols()));
                if (!op.entries.allFinite()) throw InvalidArgument("ExplicitMatrix: non-finite entry");
                b = op.entries;
            },
        },
        s);
    return {std::move(b), w};
}

BoundaryOperatorSpec adjoint_spec(const BoundaryOperatorSpec& s, const Mesh& mesh) {
    return std::visit(
        overloaded{
            [](const spec::Zero& op) -> BoundaryOperatorSpec { return op; },
            [](const spec::Multiplication& op) -> BoundaryOperatorSpec { return op; },
            [](const spec::Kernel& op) -> BoundaryOperatorSpec {
                auto k = op.k;
                return spec::Kernel{[k](const Point& x, const Point& y) { return k(y, x); }};
            },
            [](const spec::RankOne& op) -> BoundaryOperatorSpec { return op; },
            [](const spec::RotationCommutator& op) -> BoundaryOperatorSpec {
                return spec::RotationCommutator{-op.angle};
            },
            [](const spec::Convolution& op) -> BoundaryOperatorSpec { return op; },
            [&](const spec::ExplicitMatrix& op) -> BoundaryOperatorSpec {
                const DiscreteBoundaryOperator d = discretize_boundary_operator(op, mesh);
                return spec::ExplicitMatrix{d.weighted_adjoint()};
            },
        },
        s);
}

WeightedNorms weighted_norms(const DiscreteBoundaryOperator& op) {
    WeightedNorms out;
    const int m = op.size();
    if (m == 0) return out;
    const Eigen::VectorXd& w = op.weights;
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::MatrixXd x = sw.asDiagonal() * op.matrix * sw.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    out.l2 = svd.singularValues()(0);

    const Eigen::MatrixXd a = op.matrix.cwiseAbs();
    for (int j = 0; j < m; ++j) out.l1 = std::max(out.l1, a.col(j).dot(w) / w[j]);
    out.linf = a.rowwise().sum().maxCoeff();

    // Orthonormal basis of {y : sqrt(w) . y = 0}, i.e. mean-zero f = W^{-1/2} y.
    const Eigen::VectorXd e = sw.normalized();
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m, m) - e * e.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd0(x * proj);
    out.l2_on_mean_zero = svd0.singularValues()(0);
    return out;
}

DiscreteBoundaryOperator modulus_operator(const DiscreteBoundaryOperator& op) {
    return {op.matrix.cwiseAbs(), op.weights};
}

}  // namespace robinlab
