// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "robinlab/errors.hpp"
#include "robinlab/oracles.hpp"
#include "robinlab/positivity.hpp"
#include "robinlab/semigroup.hpp"
#include "robinlab/spectral.hpp"
#include "robinlab/symmetry.hpp"
#include "support.hpp"

using namespace robinlab;
using namespace robinlab::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "NOT ") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd x_coords(const Mesh& m) {
    Eigen::VectorXd x(m.vertex_count());
    for (int i = 0; i < m.vertex_count(); ++i) x[i] = m.vertices[i][0];
    return x;
}

std::vector<double> decade_from_floor(const Mesh& m, int count) {
    const double lo = resolution_floor(m);
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(10.0, static_cast<double>(i) / (count - 1)));
    return ts;
}

Outcome c1_interval_spectrum() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (double b : {0.1, 0.2, 0.3}) {
        const ConvergenceTable t = interval_oracle_vs_fem(b, {100, 200, 400});
        const double err = t.rows.back().error;
        o.require(err <= 1e-3, "b=" + fmt("%.1f", b) + " err " + fmt("%.2e", err) + " <= 1e-3");
        o.require(t.min_order >= 1.8, "order " + fmt("%.3f", t.min_order) + " >= 1.8");
    }
    const double s = seconds_since(t0);
    o.require(s < 10.0, "runtime " + fmt("%.1f", s) + " s < 10 s");
    return o;
}

Outcome c2_threshold_and_crossing() {
    Outcome o;
    const AssembledProblem pb = interval_problem(400, interval_example(1.0 / 3.0));
    const SpectralReport r = solve_eigs(pb, pb.size());
    int best = 0;
    for (int i = 1; i < r.count(); ++i)
        if (std::abs(r.eigenvalues[i]) < std::abs(r.eigenvalues[best])) best = i;
    const double lam = std::abs(r.eigenvalues[best]);
    o.require(lam <= 1e-4, "|lambda| " + fmt("%.2e", lam) + " <= 1e-4");
    const Eigen::VectorXd u = r.real_eigenvector(best, pb.mass);
    const Eigen::VectorXd x = x_coords(pb.mesh);
    const double corr = std::abs(u.dot(x)) / (u.norm() * x.norm());
    o.require(corr >= 0.999, "corr(u, x) " + fmt("%.6f", corr) + " >= 0.999");
    const double mu = detect_crossing();
    o.require(std::abs(mu - std::atanh(1 / std::sqrt(3.0))) <= 1e-6, "crossing mu " + fmt("%.8f", mu) + " vs arctanh(1/sqrt3)");
    o.require(std::abs(mu - 0.658479) <= 1e-6, "crossing within 1e-6 of 0.658479");
    return o;
}

Outcome c3_peripheral() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const AssembledProblem pb = disk_problem(8, 32, rank_one_cos());
    const SpectralReport r = solve_eigs(pb, 4);
    const PeripheralVerdict v = classify_peripheral_spectrum(r, pb.boundary);
    o.require(v.applicable, "B + B* PSD");
    o.require(r.spectral_bound <= 1e-6, "s " + fmt("%.2e", r.spectral_bound) + " <= 1e-6");
    o.require(r.kernel_dimension == 1 && r.kernel_constant, "kernel one-dimensional and constant");
    o.require(r.kernel_max_deviation <= 1e-6, "kernel deviation " + fmt("%.2e", r.kernel_max_deviation));
    o.require(v.zero_in_spectrum && v.b_annihilates_one && v.kernel_criterion_consistent, "0 in sigma and B1 = 0");
    const AssembledProblem neg = disk_problem(8, 32, spec::Multiplication{[](const Point&) { return 0.1; }});
    const SpectralReport rn = solve_eigs(neg, 4);
    const PeripheralVerdict vn = classify_peripheral_spectrum(rn, neg.boundary);
    o.require(!vn.zero_in_spectrum && !vn.b_annihilates_one && vn.kernel_criterion_consistent,
              "0.1 Identity: 0 not in sigma and B1 != 0");
    const double s = seconds_since(t0);
    o.require(s < 30.0, "runtime " + fmt("%.1f", s) + " s < 30 s");
    return o;
}

Outcome c4_positivity_equivalence() {
    Outcome o;
    const std::vector<double> ts{0.1, 0.5, 1.0, 5.0};
    struct Case {
        std::string name;
        std::function<AssembledProblem()> make;
    };
    const std::vector<Case> cases{
        {"zero/disk", [] { return disk_problem(4, 16, spec::Zero{}); }},
        {"multiplication/disk", [] { return disk_problem(4, 16, spec::Multiplication{[](const Point& p) { return 1 + p[0]; }}); }},
        {"kernel+/disk",
         [] { return disk_problem(4, 16, spec::Kernel{[](const Point& x, const Point& y) { return -std::exp(-std::hypot(x[0] - y[0], x[1] - y[1])); }}); }},
        {"kernel-/disk",
         [] { return disk_problem(4, 16, spec::Kernel{[](const Point& x, const Point& y) { return std::exp(-std::hypot(x[0] - y[0], x[1] - y[1])); }}); }},
        {"rank_one/disk", [] { return disk_problem(4, 32, rank_one_cos()); }},
        {"rotation/disk", [] { return disk_problem(4, 32, spec::RotationCommutator{std::numbers::pi / 2}); }},
        {"convolution/disk", [] { return disk_problem(4, 32, spec::Convolution{{{0, -0.1}}}); }},
        {"explicit b=0.2/interval", [] { return interval_problem(50, interval_example(0.2)); }},
        {"explicit kernel-1/interval", [] { return interval_problem(50, spec::ExplicitMatrix{two_point(1, -1, -1, 1)}); }},
        {"explicit swap/interval", [] { return interval_problem(50, spec::ExplicitMatrix{two_point(0, 1, 1, 0)}); }},
    };
    int positive = 0;
    for (const Case& c : cases) {
        const BulkBoundaryVerdict v = bulk_equals_boundary_positivity(c.make(), ts);
        positive += v.bulk_positive;
        o.require(v.agree, c.name + (v.bulk_positive ? " (+)" : " (-)"));
    }
    o.require(positive > 0 && positive < static_cast<int>(cases.size()), "both verdicts represented");
    return o;
}

Outcome c5_eventual_positivity() {
    Outcome o;
    const Mesh m = build_disk_mesh(8, 64);
    const BoundaryOperatorSpec s = rank_one_cos();
    const auto b = discretize_boundary_operator(s, m);
    const auto w = beurling_deny_violation(b, m, &s, 200);
    const double target = std::pow(std::numbers::pi / 2, 2);
    const double value = w ? w->value : 0.0;
    o.require(w && std::abs(value - target) <= 0.05 * target,
              "BD witness b[v+,v-] " + fmt("%.6f", value) + " within 5% of (pi/2)^2 = " + fmt("%.6f", target));

    const AssembledProblem pb = disk_problem(8, 32, s);
    const double e_min = Propagator(pb).at(0.01).minCoeff();
    o.require(e_min < 0.0, "min E(0.01) " + fmt("%.2e", e_min) + " < 0");
    const auto res = find_eventual_positivity(pb, 4.0, 20, false);
    const auto* cert = std::get_if<PositivityCertificate>(&res);
    o.require(cert && cert->t0 > 0 && cert->delta > 0,
              cert ? "certificate t0 " + fmt("%.4g", cert->t0) + ", delta " + fmt("%.4g", cert->delta) : "certificate");
    if (cert) {
        const CertificateCheck chk = revalidate_certificate(pb, *cert, 5, 20);
        o.require(chk.passes && chk.max_violation <= 1e-9, "revalidation max violation " + fmt("%.3g", chk.max_violation));
    }
    return o;
}

Outcome c6_rotation() {
    Outcome o;
    const Mesh m = build_disk_mesh(8, 64);
    const auto b = discretize_boundary_operator(spec::RotationCommutator{std::numbers::pi / 2}, m);
    const Eigen::VectorXd f = quadrant_function(m, 0, 3);
    const double value = b.form(f.cwiseMax(0.0), (-f).cwiseMax(0.0));
    o.require(std::abs(value - std::numbers::pi / 2) <= 0.05 * std::numbers::pi / 2,
              "b[f+,f-] " + fmt("%.6f", value) + " within 5% of pi/2");
    return o;
}

Outcome c7_domination() {
    Outcome o;
    const std::vector<double> ts{0.1, 0.5, 1.0};
    const std::vector<std::pair<std::string, BoundaryOperatorSpec>> ops{
        {"rank_one", rank_one_cos()},
        {"kernel", spec::Kernel{[](const Point& x, const Point& y) { return 0.5 * std::cos(3 * (x[0] - y[0])) * (1 + x[1] * y[1]); }}},
    };
    for (const auto& [name, s] : ops) {
        const AssembledProblem pb = disk_problem(6, 32, s);
        const DominatingConstruction d = build_dominating_operator(pb.boundary, pb);
        o.require(d.domination_margin >= -1e-12, name + " domination margin " + fmt("%.2e", d.domination_margin));
        o.require(d.boundary_equality_residual <= 1e-10, name + " boundary equality " + fmt("%.2e", d.boundary_equality_residual));
        o.require((-d.b2.matrix).minCoeff() >= -1e-12, name + " -B2 >= 0");
        o.require(d.supersolution_min >= -1e-10, name + " supersolution " + fmt("%.2e", d.supersolution_min));
        const DominationReport r = check_domination(pb, with_boundary(pb, d.b2, false), ts, 50);
        o.require(r.holds, name + " domination holds (excess " + fmt("%.2e", r.worst_excess) + ")");
    }
    return o;
}

Outcome c8_ultracontractivity() {
    Outcome o;
    const AssembledProblem line = interval_problem(400, spec::Zero{});
    const UltraFit f1d = fit_ultracontractivity(line, decade_from_floor(line.mesh, 8));
    o.require(f1d.mu >= 1.7 && f1d.mu <= 2.3, "1D mu " + fmt("%.3f", f1d.mu) + " in [1.7, 2.3]");
    o.require(f1d.r_squared >= 0.98, "1D r^2 " + fmt("%.4f", f1d.r_squared));
    const AssembledProblem disk = disk_problem(16, 64, spec::Zero{});
    const UltraFit f2d = fit_ultracontractivity(disk, decade_from_floor(disk.mesh, 8));
    o.require(f2d.mu >= 2.0 && f2d.mu <= 3.0, "2D mu " + fmt("%.3f", f2d.mu) + " in [2, 3]");
    o.require(f2d.r_squared >= 0.98, "2D r^2 " + fmt("%.4f", f2d.r_squared));

    double worst = 0.0;
    for (const AssembledProblem& pb : {disk_problem(6, 32, rank_one_cos()), disk_problem(6, 32, spec::Zero{}),
                                      disk_problem(6, 32, spec::RotationCommutator{std::numbers::pi / 2})}) {
        if (pb.boundary.min_real_part() < -1e-12) continue;
        const Propagator p(pb);
        for (double t : {0.01, 0.1, 1.0, 10.0}) worst = std::max(worst, p.m_norm(t));
    }
    o.require(worst <= 1.0 + 1e-9, "contractivity max ||E(t)||_M " + fmt("%.12f", worst));
    return o;
}

Outcome c9_symmetry() {
    Outcome o;
    const AssembledProblem pb = disk_problem(8, 128, spec::Convolution{{{0, -0.1}}});
    const InvarianceVerdict v = verify_invariant_leading_eigenfunction(pb, build_group_action(pb.mesh, {GroupKind::CyclicRotation, 128}));
    o.require(v.applicable, "hypotheses hold" + (v.applicable ? std::string() : " (" + v.failed_hypothesis + ")"));
    o.require(v.spectral_bound > 0.0, "s " + fmt("%.8f", v.spectral_bound) + " > 0");
    o.require(v.max_anti_invariant_norm <= 1e-6, "||(I-P)u||_M " + fmt("%.2e", v.max_anti_invariant_norm));
    o.require(v.positive_observed, "min nodal value " + fmt("%.4f", v.min_nodal_value) + " > 0");
    const double res = bessel_condition_residual(v.spectral_bound, -0.1);
    o.require(res <= 1e-4, "Bessel residual " + fmt("%.2e", res));

    const AssembledProblem line = problem_on(build_interval_mesh(-1, 1, 200, true), interval_example(2.0));
    const InvarianceVerdict w = verify_invariant_leading_eigenfunction(line, build_group_action(line.mesh, {}));
    o.require(!w.applicable && !w.invariant_observed && !w.positive_observed && w.max_anti_invariant_norm > 0.99,
              "b=2: smallness fails, leading eigenfunction odd (anti norm " + fmt("%.3f", w.max_anti_invariant_norm) + ")");
    return o;
}

Outcome c10_projections() {
    Outcome o;
    double worst = 0.0;
    std::mt19937_64 rng(10);
    std::normal_distribution<double> normal;
    const std::vector<std::pair<AssembledProblem, GroupSpec>> cases{
        {problem_on(build_interval_mesh(-1, 1, 40, true), spec::Zero{}), GroupSpec{}},
        {disk_problem(6, 32, spec::Zero{}), GroupSpec{GroupKind::CyclicRotation, 32}},
        {problem_on(build_disk_mesh(6, 32, DiskTriangulation::Alternating), spec::Zero{}), GroupSpec{GroupKind::DihedralOnDisk, 16}},
    };
    for (const auto& [pb, g] : cases) {
        const SymmetricProjection pr = symmetric_projection(build_group_action(pb.mesh, g));
        worst = std::max({worst, max_abs(pr.p * pr.p - pr.p), max_abs(pr.p.transpose() * pb.mass - pb.mass * pr.p),
                          max_abs(pb.trace * pr.p - pr.q * pb.trace)});
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd f(pb.size()), h(pb.size());
            for (int i = 0; i < pb.size(); ++i) {
                f[i] = normal(rng);
                h[i] = normal(rng);
            }
            const Eigen::VectorXd a = pb.trace * (pr.p * f), b = pb.trace * (h - pr.p * h);
            worst = std::max(worst, std::abs(a.cwiseProduct(pb.boundary.weights).dot(b)));
        }
    }
    o.require(worst <= 1e-12, "projection identities max defect " + fmt("%.2e", worst));
    const double target = std::pow(2 / std::numbers::pi, 2);
    std::vector<double> errs;
    for (int n : {50, 100, 200, 400}) {
        const AssembledProblem pb = problem_on(build_interval_mesh(-1, 1, n, true), spec::Zero{});
        errs.push_back(std::abs(beta_constant(pb, build_group_action(pb.mesh, {})).c0 - target) / target);
    }
    o.require(errs.back() <= 0.02, "c0 relative error " + fmt("%.2e", errs.back()) + " <= 2% at n=400");
    o.require(errs.back() < errs.front(), "c0 error decreases under refinement");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 interval spectrum", c1_interval_spectrum},   {"2 threshold and crossing", c2_threshold_and_crossing},
        {"3 peripheral spectrum", c3_peripheral},        {"4 positivity equivalence", c4_positivity_equivalence},
        {"5 eventual positivity", c5_eventual_positivity}, {"6 rotation example", c6_rotation},
        {"7 domination", c7_domination},                 {"8 ultracontractivity", c8_ultracontractivity},
        {"9 symmetry", c9_symmetry},                     {"10 symmetric projections", c10_projections},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
