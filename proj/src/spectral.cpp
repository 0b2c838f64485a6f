#include "robinlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "robinlab/errors.hpp"
#include "robinlab/semigroup.hpp"

namespace robinlab {

namespace {

double m_norm_complex(const Eigen::VectorXcd& v, const Eigen::MatrixXd& mass) {
    return std::sqrt(std::max(0.0, (v.adjoint() * (mass.cast<std::complex<double>>() * v))(0).real()));
}

}  // namespace

Eigen::VectorXd SpectralReport::real_eigenvector(int i, const Eigen::MatrixXd& mass) const {
    Eigen::VectorXcd v = eigenvectors.col(i);
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if (std::abs(v[k]) > 0.0) v *= std::conj(v[k]) / std::abs(v[k]);
    Eigen::VectorXd r = v.real();
    const double norm = std::sqrt(r.dot(mass * r));
    if (norm > 0.0) r /= norm;
    const double mean = (mass * r).sum();
    if (mean < -1e-12 * r.cwiseAbs().maxCoeff()) r = -r;
    return r;
}

double rayleigh_quotient(const AssembledProblem& problem, const Eigen::VectorXd& u) {
    return u.dot(problem.form * u) / u.dot(problem.mass * u);
}

SpectralReport solve_eigs(const AssembledProblem& problem, int count) {
    const int n = problem.size();
    if (count < 1 || count > n) throw InvalidArgument("solve_eigs: count must lie in [1, vertex count]");
    if (n > kDenseVertexBudget) throw BudgetExceeded("solve_eigs: dense solver limited to 2000 vertices");
    SpectralReport rep;
    rep.self_adjoint = problem.is_symmetric(1e-13);

    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    if (rep.self_adjoint) {
        const Eigen::MatrixXd sym = 0.5 * (problem.form + problem.form.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sym, problem.mass);
        if (ges.info() != Eigen::Success) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.mass);
            const auto& s = svd.singularValues();
            throw NumericalError("solve_eigs: generalized eigensolver breakdown (cond(M) ~ " +
                                 std::to_string(s(0) / s(s.size() - 1)) + ")");
        }
        values = ges.eigenvalues().cast<std::complex<double>>();
        vectors = ges.eigenvectors().cast<std::complex<double>>();
    } else {
        const Eigen::MatrixXd g = Eigen::PartialPivLU<Eigen::MatrixXd>(problem.mass).solve(problem.form);
        Eigen::EigenSolver<Eigen::MatrixXd> es(g);
        if (es.info() != Eigen::Success) throw NumericalError("solve_eigs: nonsymmetric eigensolver breakdown");
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
        return values[a].imag() < values[b].imag();
    });

    const std::complex<double> lead = values[order[0]];
    const double scale = std::max(1.0, std::abs(values[order[n - 1]]));
    const double zero_tol = std::max(1e-9, 1e-14 * scale);
    const double cluster_tol = 1e-6 * (1.0 + std::abs(lead));
    rep.spectral_bound = -lead.real();

    int cluster = 0;
    bool off_axis_tie = std::abs(lead.imag()) > cluster_tol;
    for (int idx : order) {
        const auto z = values[idx];
        if (std::abs(z.real() - lead.real()) <= cluster_tol) {
            if (std::abs(z - lead) <= cluster_tol)
                ++cluster;
            else
                off_axis_tie = true;
        }
    }
    rep.dominant = !off_axis_tie;
    rep.simple = rep.dominant && cluster == 1;
    rep.min_nonleading_gap = n > 1 ? values[order[1]].real() - lead.real() : 0.0;

    const Eigen::MatrixXcd mass_c = problem.mass.cast<std::complex<double>>();
    const Eigen::MatrixXcd form_c = problem.form.cast<std::complex<double>>();
    rep.eigenvalues.resize(count);
    rep.eigenvectors.resize(n, count);
    for (int c = 0; c < count; ++c) {
        Eigen::VectorXcd v = vectors.col(order[c]);
        v /= m_norm_complex(v, problem.mass);
        rep.eigenvalues[c] = values[order[c]];
        rep.eigenvectors.col(c) = v;
        rep.residuals.push_back((form_c * v - values[order[c]] * (mass_c * v)).norm() / v.norm());
    }

    rep.kernel_max_deviation = 0.0;
    for (int c = 0; c < n; ++c) {
        const auto z = values[order[c]];
        if (std::abs(z) > zero_tol) continue;
        ++rep.kernel_dimension;
        Eigen::VectorXcd v = vectors.col(order[c]);
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::conj(v[k]) / std::abs(v[k]);
        const double mean = v.real().mean();
        const double dev = (v.real().array() - mean).abs().maxCoeff() / v.real().cwiseAbs().maxCoeff();
        rep.kernel_max_deviation = std::max(rep.kernel_max_deviation, dev);
    }
    rep.zero_in_spectrum = rep.kernel_dimension > 0;
    rep.kernel_constant = rep.zero_in_spectrum && rep.kernel_max_deviation <= 1e-8;
    return rep;
}

PeripheralVerdict classify_peripheral_spectrum(const SpectralReport& report, const DiscreteBoundaryOperator& b) {
    PeripheralVerdict v;
    v.accretivity_margin = b.min_real_part();
    const double bscale = std::max(1.0, b.matrix.cwiseAbs().maxCoeff());
    v.applicable = v.accretivity_margin >= -1e-12 * bscale;
    v.b_one_residual = (b.matrix * Eigen::VectorXd::Ones(b.size())).cwiseAbs().maxCoeff();
    v.b_annihilates_one = v.b_one_residual <= 1e-10 * bscale;
    if (!v.applicable) return v;

    v.spectral_bound_nonpositive = report.spectral_bound <= 1e-8;
    const double zero_tol = 1e-8;
    v.imaginary_axis_only_zero = true;
    for (int i = 0; i < report.count(); ++i) {
        const auto z = report.eigenvalues[i];
        if (std::abs(z.real()) <= zero_tol && std::abs(z.imag()) > zero_tol) v.imaginary_axis_only_zero = false;
    }
    v.zero_in_spectrum = report.zero_in_spectrum;
    v.kernel_simple = report.kernel_dimension == 1;
    v.kernel_constant = report.kernel_constant;
    v.kernel_criterion_consistent = v.zero_in_spectrum == v.b_annihilates_one;
    v.all_pass = v.spectral_bound_nonpositive && v.imaginary_axis_only_zero && v.kernel_criterion_consistent &&
                 (!v.zero_in_spectrum || (v.kernel_simple && v.kernel_constant));
    return v;
}

GrowthComparison spectral_bound_vs_growth(const AssembledProblem& problem, std::span<const double> ts) {
    if (ts.size() < 2) throw InvalidArgument("spectral_bound_vs_growth: need at least two times");
    GrowthComparison out;
    const Propagator prop(problem);
    std::vector<double> sorted(ts.begin(), ts.end());
    std::sort(sorted.begin(), sorted.end());
    for (double t : sorted) out.samples.emplace_back(t, prop.m_norm(t));

    const double t_max = sorted.back();
    std::vector<std::pair<double, double>> window;
    for (const auto& s : out.samples)
        if (s.first >= t_max / 10.0) window.push_back(s);
    if (window.size() < 2) window.assign(out.samples.end() - 2, out.samples.end());
    double tm = 0.0, ym = 0.0;
    for (const auto& [t, norm] : window) {
        tm += t;
        ym += std::log(norm);
    }
    tm /= window.size();
    ym /= window.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, norm] : window) {
        sxx += (t - tm) * (t - tm);
        sxy += (t - tm) * (std::log(norm) - ym);
    }
    out.growth_rate = sxy / sxx;

    out.spectral_bound = solve_eigs(problem, 1).spectral_bound;
    out.matches = std::abs(out.growth_rate - out.spectral_bound) <= 0.05 * (1.0 + std::abs(out.spectral_bound));
    return out;
}

}  // namespace robinlab
