#include "robinlab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "robinlab/errors.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

namespace {

using Perm = std::vector<int>;
using Key = std::pair<long long, long long>;

constexpr double kKeyScale = 1e9;
constexpr double kCoordTol = 1e-12;

Key key_of(const Point& p) { return {std::llround(p[0] * kKeyScale), std::llround(p[1] * kKeyScale)}; }

class VertexLookup {
public:
    explicit VertexLookup(const Mesh& mesh) : mesh_(mesh) {
        for (int i = 0; i < mesh.vertex_count(); ++i) index_.emplace(key_of(mesh.vertices[i]), i);
    }

    /// Vertex within kCoordTol of p, or -1.
    int find(const Point& p) const {
        const Key k = key_of(p);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = index_.find({k.first + dx, k.second + dy});
                if (it == index_.end()) continue;
                const Point& q = mesh_.vertices[it->second];
                if (std::hypot(q[0] - p[0], q[1] - p[1]) <= kCoordTol) return it->second;
            }
        return -1;
    }

private:
    const Mesh& mesh_;
    std::map<Key, int> index_;
};

/// Isometry number g of the group as a 2x2 matrix acting on coordinates.
Eigen::Matrix2d element_matrix(const GroupSpec& group, int g) {
    if (group.kind == GroupKind::Reflection1D) return g == 0 ? Eigen::Matrix2d::Identity() : Eigen::Matrix2d(-Eigen::Matrix2d::Identity());
    const int r = g % group.n;
    const double theta = 2.0 * std::numbers::pi * r / group.n;
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    if (g < group.n) return rot;
    Eigen::Matrix2d flip;
    flip << 1.0, 0.0, 0.0, -1.0;
    return rot * flip;
}

int group_order(const GroupSpec& group) {
    switch (group.kind) {
        case GroupKind::Reflection1D: return 2;
        case GroupKind::CyclicRotation: return group.n;
        case GroupKind::DihedralOnDisk: return 2 * group.n;
    }
    return 0;
}

Perm compose(const Perm& a, const Perm& b) {
    Perm out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[b[i]];
    return out;
}

void verify_group(const std::vector<Perm>& perms, const char* what) {
    const std::set<Perm> set(perms.begin(), perms.end());
    if (set.size() != perms.size()) throw InvalidArgument(std::string("build_group_action: repeated ") + what + " permutation");
    Perm id(perms.front().size());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
    if (!set.count(id)) throw InvalidArgument(std::string("build_group_action: identity missing from ") + what + " permutations");
    for (const Perm& a : perms) {
        Perm inv(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) inv[a[i]] = static_cast<int>(i);
        if (!set.count(inv)) throw InvalidArgument(std::string("build_group_action: ") + what + " permutations lack an inverse");
        for (const Perm& b : perms)
            if (!set.count(compose(a, b)))
                throw InvalidArgument(std::string("build_group_action: ") + what + " permutations not closed");
    }
}

Eigen::PermutationMatrix<Eigen::Dynamic> as_permutation(const Perm& perm) {
    Eigen::PermutationMatrix<Eigen::Dynamic> p(static_cast<Eigen::Index>(perm.size()));
    for (std::size_t i = 0; i < perm.size(); ++i) p.indices()[static_cast<Eigen::Index>(i)] = perm[i];
    return p;
}

/// Power iteration on X^T X.
double spectral_norm(const Eigen::MatrixXd& x) {
    if (x.size() == 0) return 0.0;
    Eigen::VectorXd v(x.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.3 * std::sin(1.7 * static_cast<double>(i) + 0.4);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd w = x.transpose() * (x * v);
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        const double next = std::sqrt(n);
        v = w / n;
        if (std::abs(next - sigma) <= 1e-13 * next) return next;
        sigma = next;
    }
    return sigma;
}

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite");
    return llt.matrixL();
}

}  // namespace

std::string group_name(const GroupSpec& g) {
    switch (g.kind) {
        case GroupKind::Reflection1D: return "Reflection1D";
        case GroupKind::CyclicRotation: return "CyclicRotation(" + std::to_string(g.n) + ")";
        case GroupKind::DihedralOnDisk: return "DihedralOnDisk(" + std::to_string(g.n) + ")";
    }
    return "?";
}

Eigen::MatrixXd GroupAction::vertex_operator(int g) const {
    return as_permutation(vertex_perms.at(static_cast<std::size_t>(g))).toDenseMatrix().cast<double>();
}

Eigen::MatrixXd GroupAction::boundary_operator(int g) const {
    return as_permutation(boundary_perms.at(static_cast<std::size_t>(g))).toDenseMatrix().cast<double>();
}

GroupAction build_group_action(const Mesh& mesh, const GroupSpec& group) {
    if (group.kind == GroupKind::Reflection1D) {
        if (mesh.dim != 1) throw InvalidArgument("build_group_action: Reflection1D needs an interval mesh");
    } else {
        if (mesh.dim != 2) throw InvalidArgument("build_group_action: rotation groups need a disk mesh");
        if (group.n < 1) throw InvalidArgument("build_group_action: rotation count must be >= 1");
    }

    GroupAction action;
    action.group = group;
    const VertexLookup lookup(mesh);
    const std::vector<int> bpos = mesh.boundary_position();

    std::set<std::vector<int>> cell_set;
    for (const auto& c : mesh.cells) {
        std::vector<int> s = c;
        std::sort(s.begin(), s.end());
        cell_set.insert(std::move(s));
    }

    const int order = group_order(group);
    for (int g = 0; g < order; ++g) {
        const Eigen::Matrix2d q = element_matrix(group, g);
        Perm perm(static_cast<std::size_t>(mesh.vertex_count()));
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            const Point& x = mesh.vertices[i];
            const Eigen::Vector2d y = q * Eigen::Vector2d(x[0], x[1]);
            const int j = lookup.find({y[0], y[1]});
            if (j < 0)
                throw InvalidArgument("build_group_action: mesh not invariant under " + group_name(group) +
                                      ", vertex " + std::to_string(i) + " has no image (element " +
                                      std::to_string(g) + ")");
            perm[i] = j;
        }
        for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
            std::vector<int> image;
            for (int v : mesh.cells[c]) image.push_back(perm[v]);
            std::sort(image.begin(), image.end());
            if (!cell_set.count(image))
                throw InvalidArgument("build_group_action: mesh not invariant under " + group_name(group) +
                                      ", image of cell " + std::to_string(c) + " is not a cell (vertex " +
                                      std::to_string(mesh.cells[c][0]) + ")");
        }
        Perm bperm(static_cast<std::size_t>(mesh.boundary_count()));
        for (int k = 0; k < mesh.boundary_count(); ++k) {
            const int image = bpos[perm[mesh.boundary_nodes[k]]];
            if (image < 0)
                throw InvalidArgument("build_group_action: boundary vertex " + std::to_string(mesh.boundary_nodes[k]) +
                                      " maps into the interior");
            if (std::abs(mesh.boundary_weights[image] - mesh.boundary_weights[k]) > 1e-12)
                throw InvalidArgument("build_group_action: boundary weights not invariant at vertex " +
                                      std::to_string(mesh.boundary_nodes[k]));
            bperm[k] = image;
        }
        action.vertex_perms.push_back(std::move(perm));
        action.boundary_perms.push_back(std::move(bperm));
    }
    verify_group(action.vertex_perms, "vertex");
    verify_group(action.boundary_perms, "boundary");
    return action;
}

SymmetricProjection symmetric_projection(const GroupAction& action) {
    const auto n = static_cast<Eigen::Index>(action.vertex_perms.front().size());
    const auto m = static_cast<Eigen::Index>(action.boundary_perms.front().size());
    SymmetricProjection out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(m, m)};
    const double w = 1.0 / action.order();
    for (int g = 0; g < action.order(); ++g) {
        const Perm& vp = action.vertex_perms[g];
        for (Eigen::Index i = 0; i < n; ++i) out.p(vp[i], i) += w;
        const Perm& bp = action.boundary_perms[g];
        for (Eigen::Index k = 0; k < m; ++k) out.q(bp[k], k) += w;
    }
    return out;
}

EquivarianceReport check_equivariance(const Eigen::MatrixXd& op, const GroupAction& action,
                                      const std::optional<Eigen::VectorXd>& weights) {
    if (op.rows() != op.cols()) throw InvalidArgument("check_equivariance: operator must be square");
    const auto n = op.rows();
    const bool on_vertices = n == static_cast<Eigen::Index>(action.vertex_perms.front().size());
    const bool on_boundary = n == static_cast<Eigen::Index>(action.boundary_perms.front().size());
    if (!on_vertices && !on_boundary) throw InvalidArgument("check_equivariance: operator size matches neither vertices nor boundary");
    if (weights && weights->size() != n) throw InvalidArgument("check_equivariance: metric size mismatch");
    const auto& perms = on_vertices ? action.vertex_perms : action.boundary_perms;

    auto metric_norm = [&](const Eigen::MatrixXd& x) {
        if (!weights) return spectral_norm(x);
        const Eigen::VectorXd s = weights->cwiseSqrt();
        return spectral_norm(s.asDiagonal() * x * s.cwiseInverse().asDiagonal());
    };

    EquivarianceReport out;
    out.op_norm = metric_norm(op);
    for (const Perm& perm : perms) {
        const auto t = as_permutation(perm);
        const Eigen::MatrixXd diff = op * t - t * op;
        out.defect = std::max(out.defect, metric_norm(diff));
    }
    const SymmetricProjection proj = symmetric_projection(action);
    const Eigen::MatrixXd& p = on_vertices ? proj.p : proj.q;
    out.projection_commutator = metric_norm(op * p - p * op);
    out.equivariant = out.defect <= 1e-10 * out.op_norm;
    return out;
}

ScalarCommutantVerdict scalar_commutant_check(int n, int trials, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("scalar_commutant_check: n must be positive");
    if (trials < 1) throw InvalidArgument("scalar_commutant_check: trials must be positive");
    ScalarCommutantVerdict out;
    out.trials = trials;
    Eigen::Matrix2d j;
    j << 0.0, -1.0, 1.0, 0.0;
    const double theta = 2.0 * std::numbers::pi / n;
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    out.skew_generator_commutes = (j * r - r * j).norm() <= 1e-14;
    out.skew_generator_scalar = (j - 0.5 * j.trace() * Eigen::Matrix2d::Identity()).norm() <= 1e-12;
    // +-I is not transitive on the circle: every symmetric matrix commutes with it.
    if (n < 3) return out;
    out.applicable = true;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    out.all_scalar = true;
    for (int t = 0; t < trials; ++t) {
        Eigen::Matrix2d s;
        s(0, 0) = normal(rng);
        s(1, 1) = normal(rng);
        s(0, 1) = s(1, 0) = normal(rng);
        Eigen::Matrix2d avg = Eigen::Matrix2d::Zero();
        Eigen::Matrix2d rg = Eigen::Matrix2d::Identity();
        for (int g = 0; g < n; ++g) {
            avg += rg * s * rg.transpose();
            rg = r * rg;
        }
        avg /= n;
        const double dev = (avg - 0.5 * avg.trace() * Eigen::Matrix2d::Identity()).norm() / std::max(1.0, s.norm());
        out.max_deviation = std::max(out.max_deviation, dev);
        if (dev > 1e-12) out.all_scalar = false;
    }
    return out;
}

BetaConstant beta_constant(const AssembledProblem& problem, const GroupAction& action) {
    if (!problem.coefficient.symmetric) throw InvalidArgument("beta_constant: coefficient must be symmetric");
    const Eigen::Index n = problem.size();
    if (static_cast<Eigen::Index>(action.vertex_perms.front().size()) != n)
        throw InvalidArgument("beta_constant: action does not match the mesh");
    const Eigen::MatrixXd p = symmetric_projection(action).p;
    const Eigen::MatrixXd l = lower_cholesky(problem.mass);
    const Eigen::MatrixXd lt = l.transpose();

    // Symmetric projector onto range(I - P) in the coordinates y = L^T u.
    const Eigen::MatrixXd anti = Eigen::MatrixXd::Identity(n, n) - p;
    Eigen::MatrixXd pi = lt * l.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(anti);
    pi = 0.5 * (pi + pi.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pes(pi);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < n; ++i)
        if (pes.eigenvalues()[i] > 0.5) cols.push_back(i);
    if (cols.empty()) throw InvalidArgument("beta_constant: anti-invariant subspace is trivial");
    Eigen::MatrixXd u(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) u.col(static_cast<Eigen::Index>(c)) = pes.eigenvectors().col(cols[c]);
    const Eigen::MatrixXd z = lt.triangularView<Eigen::Upper>().solve(u);  // M-orthonormal basis

    Eigen::MatrixXd restricted = z.transpose() * problem.gradient_gram * z;
    restricted = 0.5 * (restricted + restricted.transpose()).eval();
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(restricted, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (!(lmin > 1e-12)) throw NumericalError("beta_constant: Poincare eigenvalue on the anti-invariant subspace vanishes");

    const Eigen::MatrixXd trace_gram = problem.trace.transpose() * problem.boundary.weights.asDiagonal() * problem.trace;
    const Eigen::MatrixXd h1 = problem.mass + problem.gradient_gram;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(trace_gram, h1, Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) throw NumericalError("beta_constant: trace eigenproblem failed");

    BetaConstant out;
    out.c0 = 1.0 / lmin;
    out.c1 = ges.eigenvalues()[n - 1];
    out.c = (out.c0 + 1.0) * out.c1;
    out.beta = problem.coefficient.declared_alpha / out.c;
    return out;
}

InvarianceVerdict verify_invariant_leading_eigenfunction(const AssembledProblem& problem, const GroupAction& action) {
    InvarianceVerdict v;
    const DiscreteBoundaryOperator& b = problem.boundary;
    v.self_adjoint = b.is_self_adjoint(1e-10) && problem.coefficient.symmetric;
    const EquivarianceReport eq = check_equivariance(b.matrix, action, b.weights);
    v.equivariance_defect = eq.defect;
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(b.size());
    v.mean_form = b.form(one, one);
    v.mean_zero_norm = weighted_norms(b).l2_on_mean_zero;
    v.beta = beta_constant(problem, action);

    if (!v.self_adjoint)
        v.failed_hypothesis = "B self-adjoint";
    else if (!eq.equivariant)
        v.failed_hypothesis = "B equivariant";
    else if (!(v.mean_form < 0.0))
        v.failed_hypothesis = "<B1,1> < 0";
    else if (v.mean_zero_norm > v.beta.beta)
        v.failed_hypothesis = "||B|mean-zero|| <= beta";
    v.applicable = v.failed_hypothesis.empty();

    const int n = problem.size();
    const SpectralReport rep = solve_eigs(problem, std::min(n, 8));
    v.spectral_bound = rep.spectral_bound;
    const double lead = rep.leading_eigenvalue();
    const double tol = 1e-8 * (1.0 + std::abs(lead));
    const Eigen::MatrixXd anti = Eigen::MatrixXd::Identity(n, n) - symmetric_projection(action).p;
    v.max_anti_invariant_norm = 0.0;
    for (int i = 0; i < rep.count(); ++i) {
        if (std::abs(rep.eigenvalues[i] - lead) > tol) continue;
        ++v.leading_multiplicity;
        const Eigen::VectorXd u = rep.real_eigenvector(i, problem.mass);
        const Eigen::VectorXd r = anti * u;
        v.max_anti_invariant_norm = std::max(v.max_anti_invariant_norm, std::sqrt(r.dot(problem.mass * r)));
    }
    v.invariant_observed = v.max_anti_invariant_norm <= 1e-6;
    v.min_nodal_value = rep.real_eigenvector(0, problem.mass).minCoeff();
    v.positive_observed = v.min_nodal_value > 0.0;
    v.conclusion_holds = v.spectral_bound > 0.0 && v.invariant_observed;
    return v;
}

}  // namespace robinlab
