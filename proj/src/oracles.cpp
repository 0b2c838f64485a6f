#include "robinlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_ops.hpp"
#include "robinlab/errors.hpp"
#include "robinlab/geometry.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

namespace {

/// Root of f = target for increasing f with f(lo) <= target: grow the bracket, then bisect.
template <class F>
double increasing_root(F f, double target, double lo) {
    double hi = std::max(1.0, 2.0 * lo);
    while (f(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw NumericalError("increasing_root: bracket growth failed");
    }
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double cosh_norm(double mu) { return std::sqrt(1.0 + std::sinh(2.0 * mu) / (2.0 * mu)); }
double sinh_norm(double mu) { return std::sqrt(std::sinh(2.0 * mu) / (2.0 * mu) - 1.0); }

std::vector<double> mode_multipliers(const std::map<int, double>& q_hat, int k_max) {
    std::vector<double> q(static_cast<std::size_t>(k_max + 1), 0.0);
    std::map<int, double> seen;
    for (const auto& [k, value] : q_hat) {
        const int a = std::abs(k);
        if (auto it = seen.find(a); it != seen.end() && it->second != value)
            throw InvalidArgument("disk_mode_spectrum: q_" + std::to_string(a) + " and q_-" + std::to_string(a) + " differ");
        seen[a] = value;
        if (a <= k_max) q[a] = value;
    }
    return q;
}

/// Smallest eigenpair of the radial pencil for mode k; nodes r_i = i/n.
std::pair<double, Eigen::VectorXd> radial_mode(int k, double q, int n) {
    // 4-point Gauss. Every integrand that survives is polynomial on its element;
    // the singular phi_0^2 / r entry only enters rows dropped for k != 0.
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    const double h = 1.0 / n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int e = 0; e < n; ++e) {
        const double r0 = e * h;
        for (int g = 0; g < 4; ++g) {
            const double s = 0.5 * (gx[g] + 1.0);
            const double r = r0 + s * h;
            const double w = 0.5 * gw[g] * h;
            const double phi[2] = {1.0 - s, s};
            const double dphi[2] = {-1.0 / h, 1.0 / h};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    a(e + i, e + j) += w * (r * dphi[i] * dphi[j] + k * k / r * phi[i] * phi[j]);
                    m(e + i, e + j) += w * r * phi[i] * phi[j];
                }
        }
    }
    a(n, n) += q;
    // Nonzero modes vanish at the origin.
    const int first = k == 0 ? 0 : 1;
    const int size = n + 1 - first;
    const Eigen::MatrixXd as = a.bottomRightCorner(size, size);
    const Eigen::MatrixXd ms = m.bottomRightCorner(size, size);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(as, ms);
    if (ges.info() != Eigen::Success) throw NumericalError("disk_mode_spectrum: radial eigensolve failed");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
    v.tail(size) = ges.eigenvectors().col(0);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v /= v[imax];
    return {ges.eigenvalues()[0], v};
}

void finish_orders(ConvergenceTable& t) {
    t.min_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const auto& a = t.rows[i - 1];
        const auto& b = t.rows[i];
        const double p = std::log(a.error / b.error) / std::log(a.h / b.h);
        t.orders.push_back(p);
        t.min_order = std::min(t.min_order, p);
    }
    t.order_ok = !t.orders.empty() && t.min_order >= 1.8;
}

}  // namespace

double f1(double mu) { return mu * std::tanh(mu); }

double f2(double mu) {
    if (mu == 0.0) return 1.0 / 3.0;
    return mu / (3.0 * std::tanh(mu));
}

IntervalSpectrum interval_example_spectrum(double b) {
    if (!std::isfinite(b) || b <= 0.0) throw InvalidArgument("interval_example_spectrum: b must be positive");
    IntervalSpectrum out;
    out.b = b;

    IntervalBranchRoot r1;
    r1.branch = Branch::F1;
    r1.b = b;
    r1.mu = increasing_root(f1, b, 0.0);
    r1.lambda = r1.mu * r1.mu;
    r1.eigenfunction = EigenfunctionShape::Cosh;
    r1.coefficient = 1.0 / cosh_norm(r1.mu);
    out.roots.push_back(r1);

    const double third = 1.0 / 3.0;
    if (std::abs(b - third) <= 1e-14) {
        IntervalBranchRoot r0;
        r0.branch = Branch::Threshold;
        r0.b = b;
        r0.eigenfunction = EigenfunctionShape::Linear;
        r0.coefficient = std::sqrt(1.5);
        out.roots.insert(out.roots.begin(), r0);
    } else if (b > third) {
        IntervalBranchRoot r2;
        r2.branch = Branch::F2;
        r2.b = b;
        r2.mu = increasing_root(f2, b, 0.0);
        r2.lambda = r2.mu * r2.mu;
        r2.eigenfunction = EigenfunctionShape::Sinh;
        r2.coefficient = 1.0 / sinh_norm(r2.mu);
        if (std::abs(r2.mu - r1.mu) <= 1e-9 * (1.0 + r1.mu)) {
            out.double_root = true;
            out.roots.front().multiplicity = 2;
        } else {
            out.roots.push_back(r2);
        }
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const IntervalBranchRoot& x, const IntervalBranchRoot& y) { return x.mu < y.mu; });
    return out;
}

Eigen::VectorXd interval_eigenfunction(const IntervalBranchRoot& root, const Eigen::VectorXd& x) {
    switch (root.eigenfunction) {
        case EigenfunctionShape::Cosh: return root.coefficient * (root.mu * x.array()).cosh().matrix();
        case EigenfunctionShape::Sinh: return root.coefficient * (root.mu * x.array()).sinh().matrix();
        case EigenfunctionShape::Linear: return root.coefficient * x;
    }
    return x;
}

double crossing_point() { return std::atanh(1.0 / std::sqrt(3.0)); }

double detect_crossing(double lo, double hi) {
    auto d = [](double mu) { return f1(mu) - f2(mu); };
    if (!(d(lo) < 0.0 && d(hi) > 0.0)) throw InvalidArgument("detect_crossing: interval does not bracket the crossing");
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (d(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<BranchRow> branch_table(double mu_max, double step) {
    if (!(step > 0.0) || !(mu_max > 0.0)) throw InvalidArgument("branch_table: step and mu_max must be positive");
    std::vector<BranchRow> rows;
    const auto count = static_cast<long>(std::floor(mu_max / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
        const double mu = i * step;
        rows.push_back({mu, f1(mu), f2(mu)});
    }
    return rows;
}

bool branches_strictly_increasing(double mu_max, double step) {
    const auto rows = branch_table(mu_max, step);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].f1 > rows[i - 1].f1) || !(rows[i].f2 > rows[i - 1].f2)) return false;
    return true;
}

double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double bessel_i1(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double bessel_condition_residual(double s, double q0) {
    if (!(s > 0.0)) throw InvalidArgument("bessel_condition_residual: s must be positive");
    const double z = std::sqrt(s);
    return std::abs(z * bessel_i1(z) / bessel_i0(z) + q0);
}

DiskModeTable disk_mode_spectrum(const std::map<int, double>& q_hat, int k_max, int n_radial) {
    if (n_radial < 32) throw InvalidArgument("disk_mode_spectrum: n_radial must be >= 32");
    if (k_max < 0) throw InvalidArgument("disk_mode_spectrum: k_max must be >= 0");
    const std::vector<double> q = mode_multipliers(q_hat, k_max);
    DiskModeTable out;
    out.radii = Eigen::VectorXd::LinSpaced(n_radial + 1, 0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int k = -k_max; k <= k_max; ++k) {
        const double qk = q[static_cast<std::size_t>(std::abs(k))];
        auto [lambda, v] = radial_mode(k, qk, n_radial);
        out.rows.push_back({k, qk, lambda});
        if (lambda < best - 1e-14) {
            best = lambda;
            out.argmin_mode = k;
            out.eigenfunction = v;
        }
    }
    out.spectral_bound = -best;
    return out;
}

ConvergenceTable interval_oracle_vs_fem(double b, const std::vector<int>& resolutions) {
    if (resolutions.size() < 2) throw InvalidArgument("oracle_vs_fem: need at least two resolutions");
    const double oracle = interval_example_spectrum(b).leading().lambda;
    Eigen::MatrixXd bm(2, 2);
    bm << -2.0, 1.0, 1.0, -2.0;
    ConvergenceTable out;
    for (int n : resolutions) {
        const Mesh mesh = build_interval_mesh(-1.0, 1.0, n);
        const auto bop = discretize_boundary_operator(spec::ExplicitMatrix{b * bm}, mesh);
        const AssembledProblem pb = assemble(mesh, CoefficientField::identity(), bop, {MassLumping::Lumped, false});
        const double value = solve_eigs(pb, 1).spectral_bound;
        out.rows.push_back({n, 2.0 / n, value, oracle, std::abs(value - oracle)});
    }
    finish_orders(out);
    return out;
}

ConvergenceTable disk_oracle_vs_fem(const std::map<int, double>& q_hat, const std::vector<std::pair<int, int>>& meshes) {
    if (meshes.size() < 2) throw InvalidArgument("oracle_vs_fem: need at least two resolutions");
    int k_max = 0;
    for (const auto& [k, v] : q_hat) k_max = std::max(k_max, std::abs(k));
    k_max = std::max(k_max + 2, 4);
    const double oracle = disk_mode_spectrum(q_hat, k_max, 512).spectral_bound;
    ConvergenceTable out;
    for (const auto& [n_r, n_theta] : meshes) {
        const Mesh mesh = build_disk_mesh(n_r, n_theta);
        const auto bop = discretize_boundary_operator(spec::Convolution{q_hat}, mesh);
        const AssembledProblem pb = assemble(mesh, CoefficientField::identity(), bop, {MassLumping::Lumped, false});
        const double value = solve_eigs(pb, 1).spectral_bound;
        out.rows.push_back({n_theta, mesh.max_edge_length(), value, oracle, std::abs(value - oracle)});
    }
    finish_orders(out);
    return out;
}

}  // namespace robinlab
