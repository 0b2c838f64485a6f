#include "robinlab/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "robinlab/errors.hpp"
#include "robinlab/semigroup.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

namespace {

std::optional<MatrixEntry> most_negative_off_diagonal(const Eigen::MatrixXd& x, double tol) {
    std::optional<MatrixEntry> worst;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            if (i != j && x(i, j) < -tol && (!worst || x(i, j) < worst->value))
                worst = MatrixEntry{static_cast<int>(i), static_cast<int>(j), x(i, j)};
    return worst;
}

double bd_value(const DiscreteBoundaryOperator& b, const Eigen::VectorXd& f) {
    return b.form(f.cwiseMax(0.0), (-f).cwiseMax(0.0));
}

}  // namespace

BoundaryPositivity boundary_semigroup_positive(const DiscreteBoundaryOperator& b) {
    BoundaryPositivity out;
    const Eigen::VectorXd sw = b.weights.cwiseSqrt();
    const Eigen::MatrixXd generator = -(sw.asDiagonal() * b.matrix * sw.cwiseInverse().asDiagonal());
    out.witness = most_negative_off_diagonal(generator, 1e-12);
    out.positive = !out.witness.has_value();
    for (double t : {0.1, 1.0}) {
        const Eigen::MatrixXd arg = -t * b.matrix;
        const Eigen::MatrixXd e = arg.exp();
        out.expm_min_entry.emplace_back(t, e.minCoeff());
    }
    return out;
}

Eigen::VectorXd quadrant_function(const Mesh& mesh, int pos, int neg) {
    if (!mesh.disk) throw InvalidArgument("quadrant_function: requires a disk mesh");
    const int n = mesh.disk->n_theta;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.boundary_count());
    for (int k = 0; k < n; ++k) {
        const int q = (4 * k) / n;
        if (q == pos) f[k] = 1.0;
        if (q == neg) f[k] = -1.0;
    }
    return f;
}

std::optional<BeurlingDenyWitness> beurling_deny_violation(const DiscreteBoundaryOperator& b, const Mesh& mesh,
                                                           const BoundaryOperatorSpec* hint, int trials,
                                                           std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("beurling_deny_violation: trials must be >= 1");
    const int m = b.size();
    const double threshold = 1e-10 * std::max(1.0, (b.weights.asDiagonal() * b.matrix).cwiseAbs().maxCoeff());
    auto accept = [&](const Eigen::VectorXd& f, const char* name) -> std::optional<BeurlingDenyWitness> {
        const double value = bd_value(b, f);
        if (value > threshold) return BeurlingDenyWitness{f, value, name};
        return std::nullopt;
    };

    if (hint) {
        if (const auto* r1 = std::get_if<spec::RankOne>(hint)) {
            if (auto w = accept(sample_boundary(mesh, r1->v), "rank_one_vector")) return w;
        }
    }
    if (mesh.disk && mesh.disk->n_theta % 4 == 0) {
        // Start with +1 on the first quadrant, -1 on the fourth.
        if (auto w = accept(quadrant_function(mesh, 0, 3), "quadrant")) return w;
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
                if (p != q)
                    if (auto w = accept(quadrant_function(mesh, p, q), "quadrant")) return w;
    }
    if (mesh.disk) {
        const int kmax = std::min(8, mesh.disk->n_theta / 2);
        for (int k = 1; k <= kmax; ++k) {
            Eigen::VectorXd c(m), s(m);
            for (int i = 0; i < m; ++i) {
                c[i] = std::cos(k * mesh.boundary_angle(i));
                s[i] = std::sin(k * mesh.boundary_angle(i));
            }
            if (auto w = accept(c, "fourier_mode")) return w;
            if (auto w = accept(s, "fourier_mode")) return w;
        }
    }
    // f = e_i - e_j probes the off-diagonal entries one at a time.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) {
                Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
                f[i] = 1.0;
                f[j] = -1.0;
                if (auto w = accept(f, "node_pair")) return w;
            }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd f(m);
        for (int i = 0; i < m; ++i) f[i] = normal(rng);
        if (auto w = accept(f, "random")) return w;
    }
    return std::nullopt;
}

BulkBoundaryVerdict bulk_equals_boundary_positivity(const AssembledProblem& problem, std::span<const double> ts) {
    BulkBoundaryVerdict out;
    const Propagator prop(problem);
    double worst = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        const Eigen::MatrixXd e = prop.at(t);
        const double scale = e.cwiseAbs().maxCoeff();
        const double rel = e.minCoeff() / scale;
        if (rel < worst) {
            worst = rel;
            out.t_at_min = t;
        }
        if (e.minCoeff() < -1e-9 * scale) out.bulk_positive = false;
    }
    out.min_entry = worst;
    const BoundaryPositivity bp = boundary_semigroup_positive(problem.boundary);
    out.boundary_positive = bp.positive;
    out.boundary_witness = bp.witness;
    out.agree = out.bulk_positive == out.boundary_positive;
    return out;
}

EventualPositivityResult find_eventual_positivity(const AssembledProblem& problem, double t_max, int grid_points,
                                                  bool normalize, std::optional<double> spectral_bound) {
    if (!(t_max > 0.0)) throw InvalidArgument("find_eventual_positivity: t_max must be positive");
    if (grid_points < 10) throw InvalidArgument("find_eventual_positivity: need at least 10 grid points");
    double s = 0.0;
    if (normalize) s = spectral_bound ? *spectral_bound : solve_eigs(problem, 1).spectral_bound;

    const Propagator prop(problem);
    const Eigen::RowVectorXd hat_mass = problem.mass.colwise().sum();
    std::vector<double> grid;
    for (int j = grid_points - 1; j >= 0; --j) grid.push_back(std::ldexp(t_max, -j));

    std::vector<MarginSample> margins;
    std::vector<Eigen::VectorXd> evidence;
    for (double t : grid) {
        Eigen::MatrixXd e = prop.at(t);
        if (normalize) e *= std::exp(-s * t);
        const Eigen::MatrixXd ratio = e.array().rowwise() / hat_mass.array();
        Eigen::VectorXd per_basis = ratio.colwise().minCoeff().transpose();
        Eigen::Index node = 0, basis = 0;
        const double delta = ratio.minCoeff(&node, &basis);
        margins.push_back({t, delta, static_cast<int>(node), static_cast<int>(basis)});
        evidence.push_back(std::move(per_basis));
    }

    int first = static_cast<int>(grid.size());
    while (first > 0 && margins[first - 1].delta > kMarginFloor) --first;
    if (first == static_cast<int>(grid.size())) {
        EventualPositivityNotFound nf;
        nf.normalized = normalize;
        nf.t_max = t_max;
        nf.witness = *std::min_element(margins.begin(), margins.end(),
                                       [](const MarginSample& a, const MarginSample& b) { return a.delta < b.delta; });
        nf.margins = std::move(margins);
        return nf;
    }
    PositivityCertificate cert;
    cert.normalized = normalize;
    cert.spectral_bound = s;
    cert.t0 = grid[first];
    cert.delta = std::numeric_limits<double>::infinity();
    for (int i = first; i < static_cast<int>(grid.size()); ++i) {
        cert.delta = std::min(cert.delta, margins[i].delta);
        cert.basis_evidence.push_back(evidence[i]);
    }
    cert.grid = std::move(grid);
    cert.margins = std::move(margins);
    return cert;
}

CertificateCheck revalidate_certificate(const AssembledProblem& problem, const PositivityCertificate& cert,
                                        int n_times, int n_vectors, std::uint64_t seed) {
    CertificateCheck out;
    const Propagator prop(problem);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> when(cert.t0, 2.0 * cert.t0);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    out.max_violation = -std::numeric_limits<double>::infinity();
    const int n = problem.size();
    for (int k = 0; k < n_times; ++k) {
        const double t = when(rng);
        out.times.push_back(t);
        Eigen::MatrixXd e = prop.at(t);
        if (cert.normalized) e *= std::exp(-cert.spectral_bound * t);
        for (int v = 0; v < n_vectors; ++v) {
            Eigen::VectorXd f(n);
            for (int i = 0; i < n; ++i) f[i] = value(rng);
            const double bound = cert.delta * problem.total_mass(f);
            out.max_violation = std::max(out.max_violation, bound - (e * f).minCoeff());
        }
    }
    out.passes = out.max_violation <= 1e-9;
    return out;
}

RankOneProfile asymptotic_rank_one_profile(const AssembledProblem& problem, double t_large) {
    const int n = problem.size();
    const SpectralReport rep = solve_eigs(problem, std::min(n, 2));
    if (!rep.simple || !rep.dominant)
        throw InvalidArgument("asymptotic_rank_one_profile: leading eigenvalue is not simple and dominant");
    RankOneProfile out;
    out.eigenvalue = rep.leading_eigenvalue();
    out.u = rep.real_eigenvector(0, problem.mass);

    if (rep.self_adjoint) {
        out.v = out.u;
    } else {
        AssembledProblem adj = problem;
        adj.form = problem.form.transpose();
        const SpectralReport left = solve_eigs(adj, std::min(n, 2));
        out.v = left.real_eigenvector(0, problem.mass);
    }
    out.v /= out.u.dot(problem.mass * out.v);

    const double s = -out.eigenvalue;
    const Eigen::MatrixXd e = Propagator(problem).at(t_large) * std::exp(-s * t_large);
    const Eigen::MatrixXd limit = out.u * (problem.mass * out.v).transpose();
    out.residual = m_weighted_norm(e - limit, problem.mass);
    out.expected_bound = std::exp(-rep.min_nonleading_gap * t_large / 2.0);
    return out;
}

}  // namespace robinlab
