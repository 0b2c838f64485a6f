// Command-line front end: one subcommand per run, JSON/CSV artifacts in --out.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "robinlab/config.hpp"
#include "robinlab/errors.hpp"
#include "robinlab/oracles.hpp"
#include "robinlab/positivity.hpp"
#include "robinlab/semigroup.hpp"
#include "robinlab/spectral.hpp"
#include "robinlab/symmetry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robinlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;
};

/// Config plus the identity stamped into every artifact.
struct Context {
    ProblemConfig config;
    std::string hash;
    fs::path out;
    bool quiet = false;

    json meta() const { return {{"config_hash", hash}, {"tool_version", kToolVersion}, {"seed", config.seed}}; }

    std::string csv_header() const {
        return "# config_hash=" + hash + " tool_version=" + kToolVersion + "\n";
    }

    void write_json(const std::string& name, json body) const {
        body["meta"] = meta();
        write_atomic(out / name, dump_json(body));
        say("wrote " + (out / name).string());
    }

    void write_csv(const std::string& name, const std::string& body) const {
        write_atomic(out / name, csv_header() + body);
        say("wrote " + (out / name).string());
    }

    void say(const std::string& line) const {
        if (!quiet) std::cout << line << "\n";
    }
};

Context make_context(const Globals& g, bool need_config) {
    Context ctx;
    ctx.quiet = g.quiet;
    if (!g.config_path.empty()) {
        ctx.config = load_config(g.config_path);
    } else if (need_config) {
        throw InvalidArgument("--config is required for this subcommand");
    } else {
        ctx.config.boundary_operator.type = "zero";
    }
    if (g.seed) ctx.config.seed = *g.seed;
    ctx.hash = config_hash(ctx.config);
    ctx.out = g.out.empty() ? fs::path(ctx.config.output_dir) : fs::path(g.out);
    return ctx;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const Context& ctx, int count) {
    const AssembledProblem pb = build_problem(ctx.config);
    count = std::min(count, pb.size());
    const SpectralReport rep = solve_eigs(pb, count);
    json j;
    j["eigenvalues"] = json::array();
    for (int i = 0; i < rep.count(); ++i) j["eigenvalues"].push_back(complex_json(rep.eigenvalues[i]));
    j["residuals"] = rep.residuals;
    j["self_adjoint"] = rep.self_adjoint;
    j["spectral_bound"] = rep.spectral_bound;
    j["dominant"] = rep.dominant;
    j["simple"] = rep.simple;
    j["zero_in_spectrum"] = rep.zero_in_spectrum;
    j["kernel_dimension"] = rep.kernel_dimension;
    j["kernel_constant"] = rep.kernel_constant;
    j["kernel_max_deviation"] = rep.kernel_max_deviation;
    j["min_nonleading_gap"] = rep.min_nonleading_gap;
    ctx.write_json("spectrum.json", j);

    std::ostringstream csv;
    csv << "node,x,y";
    for (int i = 0; i < rep.count(); ++i) csv << ",v" << i;
    csv << "\n";
    std::vector<Eigen::VectorXd> vecs;
    for (int i = 0; i < rep.count(); ++i) vecs.push_back(rep.real_eigenvector(i, pb.mass));
    for (int v = 0; v < pb.size(); ++v) {
        csv << v << "," << num(pb.mesh.vertices[v][0]) << "," << num(pb.mesh.vertices[v][1]);
        for (const auto& e : vecs) csv << "," << num(e[v]);
        csv << "\n";
    }
    ctx.write_csv("eigenvectors.csv", csv.str());
    ctx.say("leading eigenvalue " + num(rep.leading_eigenvalue()) + ", s(-L_B) = " + num(rep.spectral_bound));
    return kExitOk;
}

// ---------------------------------------------------------------- evolve

Eigen::VectorXd initial_condition(const Mesh& mesh, const std::string& u0) {
    const int n = mesh.vertex_count();
    Eigen::VectorXd u(n);
    if (u0 == "constant") return Eigen::VectorXd::Ones(n);
    if (u0.rfind("hat:", 0) == 0) {
        int i = -1;
        try {
            i = std::stoi(u0.substr(4));
        } catch (const std::exception&) {
            i = -1;
        }
        if (i < 0 || i >= n) throw InvalidArgument("--u0 hat:i needs a vertex index in [0, " + std::to_string(n) + ")");
        u.setZero();
        u[i] = 1.0;
        return u;
    }
    for (int v = 0; v < n; ++v) {
        const double x = mesh.vertices[v][0], y = mesh.vertices[v][1];
        if (u0 == "x")
            u[v] = x;
        else if (u0 == "bump")
            u[v] = std::exp(-4.0 * (x * x + y * y));
        else
            throw InvalidArgument("--u0: expected constant, hat:i, x or bump");
    }
    return u;
}

int cmd_evolve(const Context& ctx, const std::string& u0, double t_end, double dt, const std::string& scheme, int every) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw InvalidArgument("--t-end and --dt must be positive");
    if (every < 1) throw InvalidArgument("--every must be >= 1");
    TimeScheme ts;
    if (scheme == "ie")
        ts = TimeScheme::ImplicitEuler;
    else if (scheme == "cn")
        ts = TimeScheme::CrankNicolson;
    else
        throw InvalidArgument("--scheme: expected ie or cn");
    const AssembledProblem pb = build_problem(ctx.config);
    const Stepper stepper(pb, dt, ts);
    Eigen::VectorXd u = initial_condition(pb.mesh, u0);
    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));

    std::ostringstream csv;
    csv << "t,mass";
    for (int v = 0; v < pb.size(); ++v) csv << ",node_" << v;
    csv << "\n";
    auto emit = [&](double t) {
        csv << num(t) << "," << num(pb.total_mass(u));
        for (int v = 0; v < pb.size(); ++v) csv << "," << num(u[v]);
        csv << "\n";
    };
    emit(0.0);
    for (long s = 1; s <= steps; ++s) {
        u = stepper.advance(u);
        if (s % every == 0 || s == steps) emit(s * dt);
    }
    ctx.write_csv("trace.csv", csv.str());
    return kExitOk;
}

// ---------------------------------------------------------------- positivity

json margin_json(const MarginSample& m) {
    return {{"t", m.t}, {"delta", m.delta}, {"node", m.node}, {"basis", m.basis}};
}

int cmd_positivity(const Context& ctx, double t_max, int grid, bool normalize) {
    const AssembledProblem pb = build_problem(ctx.config);
    const EventualPositivityResult res = find_eventual_positivity(pb, t_max, grid, normalize);
    json j;
    const std::vector<MarginSample>* margins = nullptr;
    if (const auto* c = std::get_if<PositivityCertificate>(&res)) {
        const CertificateCheck chk = revalidate_certificate(pb, *c, 5, 20, ctx.config.seed);
        j = {{"status", "certificate"}, {"normalized", c->normalized}, {"spectral_bound", c->spectral_bound},
             {"t0", c->t0}, {"delta", c->delta}, {"revalidation_max_violation", chk.max_violation},
             {"revalidation_passes", chk.passes}, {"revalidation_times", chk.times}};
        margins = &c->margins;
        ctx.say("certificate: t0 = " + num(c->t0) + ", delta = " + num(c->delta));
    } else {
        const auto& nf = std::get<EventualPositivityNotFound>(res);
        j = {{"status", "not_found"}, {"normalized", nf.normalized}, {"t_max", nf.t_max},
             {"witness", margin_json(nf.witness)}};
        margins = &nf.margins;
        ctx.say("no certificate up to t = " + num(t_max));
    }
    ctx.write_json("certificate.json", j);
    std::ostringstream csv;
    csv << "t,delta,node,basis\n";
    for (const auto& m : *margins) csv << num(m.t) << "," << num(m.delta) << "," << m.node << "," << m.basis << "\n";
    ctx.write_csv("margins.csv", csv.str());
    return kExitOk;
}

// ---------------------------------------------------------------- ultra

std::vector<double> geometric(double lo, double hi, int count) {
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    ts.back() = hi;
    return ts;
}

/// Default window: one decade starting at the resolution floor.
std::vector<double> ultra_times(const Mesh& mesh, double t_min, double t_max, int samples) {
    if (t_min <= 0.0) t_min = resolution_floor(mesh);
    if (t_max <= 0.0) t_max = std::min(1.0, 10.0 * t_min);
    if (samples < 5) throw InvalidArgument("--samples must be >= 5");
    return geometric(t_min, t_max, samples);
}

json ultra_json(const UltraFit& fit) {
    json s = json::array();
    for (const auto& [t, v] : fit.samples) s.push_back({{"t", t}, {"norm", v}});
    return {{"c", fit.c}, {"mu", fit.mu}, {"r_squared", fit.r_squared}, {"resolution_floor", fit.resolution_floor},
            {"samples", s}};
}

int cmd_ultra(const Context& ctx, double t_min, double t_max, int samples) {
    const AssembledProblem pb = build_problem(ctx.config);
    const auto ts = ultra_times(pb.mesh, t_min, t_max, samples);
    const UltraFit fit = fit_ultracontractivity(pb, ts);
    ctx.write_json("ultra.json", ultra_json(fit));
    std::ostringstream csv;
    csv << "t,norm\n";
    for (const auto& [t, v] : fit.samples) csv << num(t) << "," << num(v) << "\n";
    ctx.write_csv("ultra.csv", csv.str());
    ctx.say("mu = " + num(fit.mu) + ", r^2 = " + num(fit.r_squared));
    return kExitOk;
}

// ---------------------------------------------------------------- verify

struct CheckList {
    json items = json::array();
    bool all = true;

    void add(const std::string& name, bool passed, double value, double threshold, const std::string& note = "") {
        json c{{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}};
        if (!note.empty()) c["note"] = note;
        items.push_back(c);
        all = all && passed;
    }
};

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void suite_basic(const AssembledProblem& pb, CheckList& out) {
    const int n = pb.size();
    const double mmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(pb.mass, Eigen::EigenvaluesOnly).eigenvalues()[0];
    out.add("mass_positive_definite", mmin > 0.0, mmin, 0.0);
    const double k1 = (pb.stiffness * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    out.add("stiffness_annihilates_constants", k1 <= 1e-10 * std::max(1.0, max_abs(pb.stiffness)), k1, 1e-10);
    const bool sym_expected = pb.coefficient.symmetric && pb.boundary.is_self_adjoint(1e-12);
    out.add("form_symmetry_consistent", sym_expected == pb.is_symmetric(1e-12), pb.is_symmetric(1e-12) ? 1.0 : 0.0,
            sym_expected ? 1.0 : 0.0);
    if (pb.garding)
        out.add("garding_certified", pb.garding->certified_min_eigenvalue >= -1e-10, pb.garding->certified_min_eigenvalue,
                -1e-10);

    const Propagator prop(pb);
    const double id_err = max_abs(prop.at(0.0) - Eigen::MatrixXd::Identity(n, n));
    out.add("semigroup_identity", id_err <= 1e-12, id_err, 1e-12);
    const Eigen::MatrixXd e3 = prop.at(0.3);
    const Eigen::MatrixXd e6 = prop.at(0.6);
    const double law = max_abs(e6 - e3 * e3) / std::max(1.0, max_abs(e6));
    out.add("semigroup_law", law <= 1e-9, law, 1e-9);

    if (pb.boundary.min_real_part() >= -1e-12) {
        double worst = 0.0;
        for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, prop.m_norm(t));
        out.add("contractivity", worst <= 1.0 + 1e-9, worst, 1.0 + 1e-9);
    }
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(pb.boundary.size());
    const double b1 = (pb.boundary.matrix * one).cwiseAbs().maxCoeff();
    const double bt1 = (pb.boundary.matrix.transpose() * pb.boundary.weights).cwiseAbs().maxCoeff();
    if (b1 <= 1e-12 && bt1 <= 1e-12) {
        const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
        const double drift = std::abs(pb.total_mass(prop.at(1.0) * f) - pb.total_mass(f));
        out.add("mass_conservation", drift <= 1e-9, drift, 1e-9);
    }
    const std::vector<double> ts{0.1, 0.5, 1.0, 5.0};
    const BulkBoundaryVerdict v = bulk_equals_boundary_positivity(pb, ts);
    out.add("positivity_equivalence", v.agree, v.min_entry, 0.0,
            std::string("bulk ") + (v.bulk_positive ? "positive" : "not positive") + ", boundary " +
                (v.boundary_positive ? "positive" : "not positive"));
}

void suite_ultra(const AssembledProblem& pb, CheckList& out, json& extra) {
    const auto ts = ultra_times(pb.mesh, 0.0, 0.0, 8);
    const UltraFit fit = fit_ultracontractivity(pb, ts);
    extra["ultra"] = ultra_json(fit);
    const double lo = pb.mesh.dim == 1 ? 1.7 : 2.0;
    const double hi = pb.mesh.dim == 1 ? 2.3 : 3.0;
    out.add("ultra_mu_lower", fit.mu >= lo, fit.mu, lo);
    out.add("ultra_mu_upper", fit.mu <= hi, fit.mu, hi);
    out.add("ultra_r_squared", fit.r_squared >= 0.98, fit.r_squared, 0.98);
}

GroupSpec default_group(const Mesh& mesh) {
    if (!mesh.symmetry_tag) throw InvalidArgument("suite symmetry: the mesh carries no symmetry tag");
    switch (mesh.symmetry_tag->kind) {
        case SymmetryKind::Reflection: return {GroupKind::Reflection1D, 2};
        case SymmetryKind::Cyclic: return {GroupKind::CyclicRotation, mesh.symmetry_tag->order};
        case SymmetryKind::Dihedral: return {GroupKind::DihedralOnDisk, mesh.symmetry_tag->order};
    }
    return {};
}

void suite_symmetry(const AssembledProblem& pb, CheckList& out, json& extra, std::uint64_t seed) {
    const GroupAction action = build_group_action(pb.mesh, default_group(pb.mesh));
    const SymmetricProjection proj = symmetric_projection(action);
    const int n = pb.size();
    const Eigen::MatrixXd& p = proj.p;
    out.add("projection_idempotent", max_abs(p * p - p) <= 1e-12, max_abs(p * p - p), 1e-12);
    const double sa = max_abs(p.transpose() * pb.mass - pb.mass * p);
    out.add("projection_mass_self_adjoint", sa <= 1e-12, sa, 1e-12);
    const double p1 = (p * Eigen::VectorXd::Ones(n) - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    out.add("projection_fixes_constants", p1 <= 1e-12, p1, 1e-12);
    const double tr = max_abs(pb.trace * p - proj.q * pb.trace);
    out.add("trace_intertwines_projection", tr <= 1e-12, tr, 1e-12);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double orth = 0.0;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = normal(rng);
            b[i] = normal(rng);
        }
        const Eigen::VectorXd ga = pb.trace * (p * a);
        const Eigen::VectorXd gb = pb.trace * (b - p * b);
        orth = std::max(orth, std::abs(ga.cwiseProduct(pb.boundary.weights).dot(gb)));
    }
    out.add("trace_orthogonality", orth <= 1e-12, orth, 1e-12);

    const InvarianceVerdict v = verify_invariant_leading_eigenfunction(pb, action);
    extra["invariance"] = {{"applicable", v.applicable},
                           {"failed_hypothesis", v.failed_hypothesis},
                           {"mean_form", v.mean_form},
                           {"mean_zero_norm", v.mean_zero_norm},
                           {"beta", v.beta.beta},
                           {"c0", v.beta.c0},
                           {"c1", v.beta.c1},
                           {"spectral_bound", v.spectral_bound},
                           {"leading_multiplicity", v.leading_multiplicity},
                           {"max_anti_invariant_norm", v.max_anti_invariant_norm},
                           {"invariant_observed", v.invariant_observed},
                           {"min_nodal_value", v.min_nodal_value},
                           {"positive_observed", v.positive_observed}};
    if (v.applicable)
        out.add("invariant_leading_eigenfunction", v.conclusion_holds, v.max_anti_invariant_norm, 1e-6);
    else
        out.add("invariant_leading_eigenfunction", true, v.max_anti_invariant_norm, 1e-6,
                "not applicable: " + v.failed_hypothesis);
}

void suite_domination(const AssembledProblem& pb, CheckList& out, json& extra, std::uint64_t seed) {
    const DominatingConstruction dc = build_dominating_operator(pb.boundary, pb);
    out.add("dominating_entrywise", dc.domination_margin >= -1e-12, dc.domination_margin, 0.0);
    out.add("dominating_b1_positive", dc.b1_min_entry >= -1e-12, dc.b1_min_entry, 0.0);
    out.add("dominating_boundary_equality", dc.boundary_equality_residual <= 1e-10, dc.boundary_equality_residual, 1e-10);
    out.add("dominating_supersolution", dc.supersolution_min >= -1e-10, dc.supersolution_min, -1e-10);
    const AssembledProblem pb2 = with_boundary(pb, dc.b2, false);
    const std::vector<double> ts{0.1, 0.5, 1.0};
    const DominationReport rep = check_domination(pb, pb2, ts, 50, seed);
    out.add("domination_holds", rep.holds, rep.worst_excess, 1e-9);
    extra["domination"] = {{"lambda", dc.lambda}, {"beta_aux", dc.beta_aux}, {"seed", rep.seed}};
}

int cmd_verify(const Context& ctx, const std::string& suite) {
    static const std::set<std::string> suites{"basic", "ultra", "symmetry", "domination", "all"};
    if (!suites.count(suite)) throw InvalidArgument("--suite: expected basic, ultra, symmetry, domination or all");
    const AssembledProblem pb = build_problem(ctx.config);
    CheckList checks;
    json extra = json::object();
    const bool all = suite == "all";
    if (all || suite == "basic") suite_basic(pb, checks);
    if (all || suite == "ultra") suite_ultra(pb, checks, extra);
    if (all || suite == "symmetry") suite_symmetry(pb, checks, extra, ctx.config.seed);
    if (all || suite == "domination") suite_domination(pb, checks, extra, ctx.config.seed);
    json j{{"suite", suite}, {"checks", checks.items}, {"all_passed", checks.all}, {"details", extra}};
    ctx.write_json("report.json", j);
    for (const auto& c : checks.items)
        ctx.say(std::string(c["passed"].get<bool>() ? "PASS " : "FAIL ") + c["name"].get<std::string>());
    return checks.all ? kExitOk : kExitVerify;
}

// ---------------------------------------------------------------- oracle

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::F1: return "F1";
        case Branch::F2: return "F2";
        case Branch::Threshold: return "threshold";
    }
    return "?";
}

const char* shape_name(EigenfunctionShape s) {
    switch (s) {
        case EigenfunctionShape::Cosh: return "cosh";
        case EigenfunctionShape::Sinh: return "sinh";
        case EigenfunctionShape::Linear: return "linear";
    }
    return "?";
}

int cmd_oracle(const Context& ctx, const std::string& kind, double b, int k_max, int n_radial) {
    if (kind == "interval") {
        const IntervalSpectrum sp = interval_example_spectrum(b);
        json roots = json::array();
        for (const auto& r : sp.roots)
            roots.push_back({{"branch", branch_name(r.branch)}, {"mu", r.mu}, {"lambda", r.lambda},
                             {"eigenfunction", shape_name(r.eigenfunction)}, {"coefficient", r.coefficient},
                             {"multiplicity", r.multiplicity}});
        ctx.write_json("oracle.json", {{"kind", kind}, {"b", b}, {"roots", roots}, {"double_root", sp.double_root}});
        ctx.say("s(-L_B) = " + num(sp.leading().lambda));
        return kExitOk;
    }
    if (kind == "crossing") {
        ctx.write_json("oracle.json", {{"kind", kind}, {"closed_form", crossing_point()}, {"bisection", detect_crossing()}});
        ctx.say("mu* = " + num(crossing_point()));
        return kExitOk;
    }
    if (kind == "branches") {
        std::ostringstream csv;
        csv << "mu,f1,f2\n";
        for (const auto& r : branch_table(3.0, 0.01)) csv << num(r.mu) << "," << num(r.f1) << "," << num(r.f2) << "\n";
        ctx.write_csv("branches.csv", csv.str());
        return kExitOk;
    }
    if (kind == "disk") {
        if (ctx.config.boundary_operator.type != "convolution" && ctx.config.boundary_operator.type != "zero")
            throw InvalidArgument("oracle disk: config boundary_operator must be a convolution");
        const DiskModeTable t = disk_mode_spectrum(ctx.config.boundary_operator.q_hat, k_max, n_radial);
        std::ostringstream csv;
        csv << "mode,q,eigenvalue\n";
        for (const auto& r : t.rows) csv << r.k << "," << num(r.q) << "," << num(r.lambda_min) << "\n";
        ctx.write_csv("modes.csv", csv.str());
        json j{{"kind", kind}, {"spectral_bound", t.spectral_bound}, {"argmin_mode", t.argmin_mode}};
        const auto q0 = ctx.config.boundary_operator.q_hat.find(0);
        if (t.argmin_mode == 0 && t.spectral_bound > 0.0 && q0 != ctx.config.boundary_operator.q_hat.end())
            j["bessel_residual"] = bessel_condition_residual(t.spectral_bound, q0->second);
        ctx.write_json("oracle.json", j);
        ctx.say("s(-L_B) = " + num(t.spectral_bound) + " at mode " + std::to_string(t.argmin_mode));
        return kExitOk;
    }
    throw InvalidArgument("--kind: expected interval, crossing, branches or disk");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat equations with non-local Robin boundary conditions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "problem description (JSON)");
    app.add_option("--seed", g.seed, "override the config seed");
    app.add_option("--out", g.out, "output directory (defaults to output_dir of the config)");
    app.add_flag("--quiet", g.quiet, "no summary on stdout");

    int count = 6;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and eigenvectors of -L_B");
    spectrum->add_option("--count", count, "number of eigenpairs to store");

    std::string u0 = "constant", scheme = "cn";
    double t_end = 1.0, dt = 0.01;
    int every = 1;
    auto* evolve = app.add_subcommand("evolve", "time stepping, writes trace.csv");
    evolve->add_option("--u0", u0, "constant | hat:i | x | bump");
    evolve->add_option("--t-end", t_end);
    evolve->add_option("--dt", dt);
    evolve->add_option("--scheme", scheme, "ie | cn");
    evolve->add_option("--every", every, "output every k steps");

    double t_max = 4.0;
    int grid = 20;
    bool normalize = false;
    auto* positivity = app.add_subcommand("positivity", "search for an eventual positivity certificate");
    positivity->add_option("--t-max", t_max);
    positivity->add_option("--grid", grid, "number of times t_max 2^-j");
    positivity->add_flag("--normalize", normalize, "rescale by exp(-s t)");

    double u_tmin = 0.0, u_tmax = 0.0;
    int samples = 8;
    auto* ultra = app.add_subcommand("ultra", "fit the L2 -> Linf decay exponent");
    ultra->add_option("--t-min", u_tmin, "defaults to the resolution floor 4 h^2");
    ultra->add_option("--t-max", u_tmax, "defaults to ten times t-min");
    ultra->add_option("--samples", samples);

    std::string suite = "basic";
    auto* verify = app.add_subcommand("verify", "run an invariant suite; exit 4 on failure");
    verify->add_option("--suite", suite, "basic | ultra | symmetry | domination | all");

    std::string kind = "interval";
    double b = 0.2;
    int k_max = 8, n_radial = 128;
    auto* oracle = app.add_subcommand("oracle", "closed-form reference spectra");
    oracle->add_option("--kind", kind, "interval | crossing | branches | disk");
    oracle->add_option("--b", b, "interval parameter");
    oracle->add_option("--k-max", k_max);
    oracle->add_option("--n-radial", n_radial);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*spectrum) return cmd_spectrum(make_context(g, true), count);
        if (*evolve) return cmd_evolve(make_context(g, true), u0, t_end, dt, scheme, every);
        if (*positivity) return cmd_positivity(make_context(g, true), t_max, grid, normalize);
        if (*ultra) return cmd_ultra(make_context(g, true), u_tmin, u_tmax, samples);
        if (*verify) return cmd_verify(make_context(g, true), suite);
        if (*oracle) return cmd_oracle(make_context(g, kind == "disk"), kind, b, k_max, n_radial);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
