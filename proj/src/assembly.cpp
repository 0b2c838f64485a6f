#include "robinlab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "robinlab/errors.hpp"

namespace robinlab {

CoefficientField CoefficientField::identity() { return constant(1.0); }

CoefficientField CoefficientField::constant(double a) {
    if (!(a > 0.0)) throw InvalidArgument("CoefficientField: constant coefficient must be positive");
    CoefficientField f;
    f.evaluator = [a](const Point&) -> Eigen::Matrix2d { return a * Eigen::Matrix2d::Identity(); };
    f.declared_alpha = a;
    return f;
}

CoefficientField CoefficientField::constant_matrix(const Eigen::Matrix2d& a, double declared_alpha) {
    CoefficientField f;
    f.evaluator = [a](const Point&) -> Eigen::Matrix2d { return a; };
    f.declared_alpha = declared_alpha;
    f.symmetric = (a - a.transpose()).cwiseAbs().maxCoeff() == 0.0;
    f.g_invariant = false;
    return f;
}

CoefficientField CoefficientField::transposed() const {
    CoefficientField f = *this;
    auto eval = evaluator;
    f.evaluator = [eval](const Point& x) -> Eigen::Matrix2d { return eval(x).transpose(); };
    return f;
}

bool AssembledProblem::is_symmetric(double rel_tol) const {
    const double scale = std::max(1.0, form.cwiseAbs().maxCoeff());
    return (form - form.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

namespace {

double ellipticity_lower_bound(const Eigen::Matrix2d& a, int dim) {
    if (dim == 1) return a(0, 0);
    const Eigen::Matrix2d sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Point centroid(const Mesh& mesh, const std::vector<int>& cell) {
    Point c{0.0, 0.0};
    for (int v : cell) {
        c[0] += mesh.vertices[v][0];
        c[1] += mesh.vertices[v][1];
    }
    c[0] /= static_cast<double>(cell.size());
    c[1] /= static_cast<double>(cell.size());
    return c;
}

/// Local P1 gradients (rows) and cell measure.
void local_gradients(const Mesh& mesh, const std::vector<int>& cell, Eigen::MatrixXd& grads, double& measure) {
    if (mesh.dim == 1) {
        const double x0 = mesh.vertices[cell[0]][0], x1 = mesh.vertices[cell[1]][0];
        measure = std::abs(x1 - x0);
        grads.resize(2, 1);
        grads(0, 0) = -1.0 / (x1 - x0);
        grads(1, 0) = 1.0 / (x1 - x0);
        return;
    }
    const Point& p0 = mesh.vertices[cell[0]];
    const Point& p1 = mesh.vertices[cell[1]];
    const Point& p2 = mesh.vertices[cell[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    measure = 0.5 * std::abs(det);
    grads.resize(3, 2);
    const Point* p[3] = {&p0, &p1, &p2};
    for (int i = 0; i < 3; ++i) {
        const Point& a = *p[(i + 1) % 3];
        const Point& b = *p[(i + 2) % 3];
        grads(i, 0) = (a[1] - b[1]) / det;
        grads(i, 1) = (b[0] - a[0]) / det;
    }
}

double min_eigenvalue(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

AssembledProblem assemble(const Mesh& mesh, const CoefficientField& a, const DiscreteBoundaryOperator& b,
                          AssemblyOptions options) {
    if (!a.evaluator) throw InvalidArgument("assemble: coefficient field has no evaluator");
    if (b.size() != mesh.boundary_count())
        throw InvalidArgument("assemble: boundary operator has size " + std::to_string(b.size()) + " but mesh has " +
                              std::to_string(mesh.boundary_count()) + " boundary nodes");
    if (b.matrix.rows() != b.size() || b.matrix.cols() != b.size())
        throw InvalidArgument("assemble: boundary matrix is not square");
    validate_mesh(mesh);

    const int n = mesh.vertex_count();
    const int m = mesh.boundary_count();
    AssembledProblem p;
    p.mesh = mesh;
    p.coefficient = a;
    p.boundary = b;
    p.mass = Eigen::MatrixXd::Zero(n, n);
    p.stiffness = Eigen::MatrixXd::Zero(n, n);
    p.gradient_gram = Eigen::MatrixXd::Zero(n, n);

    Eigen::MatrixXd grads;
    double measure = 0.0;
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
        const auto& cell = mesh.cells[c];
        const int k = static_cast<int>(cell.size());
        const Eigen::Matrix2d coeff = a.evaluator(centroid(mesh, cell));
        if (!coeff.allFinite()) throw InvalidArgument("assemble: coefficient is not finite on cell " + std::to_string(c));
        if (ellipticity_lower_bound(coeff, mesh.dim) < a.declared_alpha - 1e-12)
            throw EllipticityViolation("assemble: declared ellipticity bound violated on cell " + std::to_string(c), c);
        local_gradients(mesh, cell, grads, measure);
        const Eigen::MatrixXd ad = coeff.topLeftCorner(mesh.dim, mesh.dim);
        const Eigen::MatrixXd k_local = measure * grads * ad * grads.transpose();
        const Eigen::MatrixXd g_local = measure * grads * grads.transpose();
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                p.stiffness(cell[i], cell[j]) += k_local(i, j);
                p.gradient_gram(cell[i], cell[j]) += g_local(i, j);
                if (options.mass == MassLumping::Consistent)
                    p.mass(cell[i], cell[j]) += measure * (i == j ? 2.0 : 1.0) / ((k + 1) * k);
            }
            if (options.mass == MassLumping::Lumped) p.mass(cell[i], cell[i]) += measure / k;
        }
    }

    p.trace = Eigen::MatrixXd::Zero(m, n);
    for (int k = 0; k < m; ++k) p.trace(k, mesh.boundary_nodes[k]) = 1.0;
    p.form = p.stiffness;
    const Eigen::MatrixXd wb = b.weights.asDiagonal() * b.matrix;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) p.form(mesh.boundary_nodes[i], mesh.boundary_nodes[j]) += wb(i, j);

    if (options.compute_garding) p.garding = garding_constants(p);
    return p;
}

AssembledProblem with_boundary(const AssembledProblem& base, const DiscreteBoundaryOperator& b,
                               bool compute_garding) {
    if (b.size() != base.mesh.boundary_count()) throw InvalidArgument("with_boundary: boundary size mismatch");
    AssembledProblem p = base;
    p.boundary = b;
    p.form = p.stiffness;
    const Eigen::MatrixXd wb = b.weights.asDiagonal() * b.matrix;
    const auto& nodes = p.mesh.boundary_nodes;
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) p.form(nodes[i], nodes[j]) += wb(i, j);
    p.garding.reset();
    if (compute_garding) p.garding = garding_constants(p);
    return p;
}

GardingPair garding_constants(const AssembledProblem& problem) {
    GardingPair g;
    g.c = 0.5 * problem.coefficient.declared_alpha;
    const Eigen::MatrixXd s0 = 0.5 * (problem.form + problem.form.transpose()) - g.c * problem.gradient_gram;
    // The threshold is exact from the pencil (S0, M); the loop only absorbs rounding.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s0, problem.mass, Eigen::EigenvaluesOnly);
    g.omega = std::max(0.0, -ges.eigenvalues().minCoeff());
    if (g.omega < 1e-12) g.omega = 0.0;
    g.certified_min_eigenvalue = min_eigenvalue(s0 + g.omega * problem.mass);
    for (int guard = 0; g.certified_min_eigenvalue < -1e-10 && guard < 64; ++guard) {
        g.omega += 1e-6 * std::max(1.0, g.omega);
        g.certified_min_eigenvalue = min_eigenvalue(s0 + g.omega * problem.mass);
    }
    if (g.certified_min_eigenvalue < -1e-10) throw NumericalError("garding_constants: could not certify omega");
    return g;
}

LocalityReport check_locality(const AssembledProblem& problem, int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("check_locality: trials must be >= 1");
    const Mesh& mesh = problem.mesh;
    const int n = problem.size();
    const auto adj = mesh.adjacency();
    const double threshold = 1e-12 * std::max(1.0, problem.form.cwiseAbs().maxCoeff());
    auto disjoint = [&](int i, int j) {
        return i != j && !std::binary_search(adj[i].begin(), adj[i].end(), j);
    };

    LocalityReport report;
    // Only boundary couplings can connect non-adjacent hats, so this scan is exhaustive.
    for (int p : mesh.boundary_nodes) {
        for (int q : mesh.boundary_nodes) {
            if (!disjoint(p, q)) continue;
            const double value = problem.form(p, q);
            if (std::abs(value) > threshold) {
                report.is_local = false;
                report.witness = std::make_pair(Eigen::VectorXd::Unit(n, q), Eigen::VectorXd::Unit(n, p));
                report.witness_value = value;
                return report;
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_vertex(0, n - 1);
    std::uniform_int_distribution<int> pick_boundary(0, mesh.boundary_count() - 1);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
        std::vector<int> s1;
        for (int r = 0; r < 3; ++r) {
            const int i = (r % 2 == 0) ? mesh.boundary_nodes[pick_boundary(rng)] : pick_vertex(rng);
            s1.push_back(i);
            u[i] += coeff(rng);
        }
        for (int r = 0; r < 6; ++r) {
            const int j = (r % 2 == 0) ? mesh.boundary_nodes[pick_boundary(rng)] : pick_vertex(rng);
            bool ok = true;
            for (int i : s1) ok = ok && disjoint(i, j);
            if (ok) v[j] += coeff(rng);
        }
        const double value = v.dot(problem.form * u);
        if (std::abs(value) > threshold) {
            report.is_local = false;
            report.witness = std::make_pair(u, v);
            report.witness_value = value;
            return report;
        }
    }
    return report;
}

void write_coo(std::ostream& os, const Eigen::MatrixXd& m, double drop_tol) {
    os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol) os << i << ' ' << j << ' ' << m(i, j) << '\n';
}

}  // namespace robinlab
