#include "robinlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "robinlab/errors.hpp"

namespace robinlab {

namespace {

void check_budget(const AssembledProblem& problem) {
    if (problem.size() > kDenseVertexBudget)
        throw BudgetExceeded("dense semigroup limited to " + std::to_string(kDenseVertexBudget) +
                             " vertices (problem has " + std::to_string(problem.size()) +
                             "); use step-based evolution instead");
}

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& mass) {
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite");
    return llt.matrixL();
}

/// Y = X L^{-T}.
Eigen::MatrixXd right_divide_lt(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l) {
    const Eigen::MatrixXd yt = l.triangularView<Eigen::Lower>().solve(x.transpose());
    return yt.transpose();
}

double max_row_norm(const Eigen::MatrixXd& y) { return y.rowwise().norm().maxCoeff(); }

}  // namespace

Stepper::Stepper(const AssembledProblem& problem, double dt, TimeScheme scheme) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step: dt must be positive");
    const double eff = scheme == TimeScheme::ImplicitEuler ? dt : 0.5 * dt;
    const double omega = problem.garding ? problem.garding->omega : garding_constants(problem).omega;
    if (omega > 0.0 && eff * omega >= 1.0) {
        std::ostringstream msg;
        msg << "step: dt = " << dt << " is too large for omega = " << omega << "; use dt < "
            << (scheme == TimeScheme::ImplicitEuler ? 1.0 : 2.0) / omega;
        throw NumericalError(msg.str());
    }
    const Eigen::MatrixXd lhs = problem.mass + eff * problem.form;
    rhs_ = scheme == TimeScheme::ImplicitEuler ? problem.mass : Eigen::MatrixXd(problem.mass - eff * problem.form);
    lu_.compute(lhs);
    if (lu_.rcond() < 1e-14) {
        std::ostringstream msg;
        msg << "step: singular step matrix at dt = " << dt << " (omega = " << omega << "); try a smaller dt";
        throw NumericalError(msg.str());
    }
}

Eigen::VectorXd Stepper::advance(const Eigen::VectorXd& u) const { return lu_.solve(rhs_ * u); }

EvolutionState step(const EvolutionState& state, double dt, TimeScheme scheme) {
    if (!state.problem) throw InvalidArgument("step: state has no problem");
    if (state.u.size() != state.problem->size()) throw InvalidArgument("step: state vector has wrong length");
    const Stepper stepper(*state.problem, dt, scheme);
    return {state.t + dt, stepper.advance(state.u), state.problem};
}

Propagator::Propagator(const AssembledProblem& problem) : mass_(problem.mass) {
    check_budget(problem);
    mass_chol_ = lower_cholesky(mass_);
    self_adjoint_ = problem.is_symmetric(1e-13);
    if (self_adjoint_) {
        const Eigen::MatrixXd sym = 0.5 * (problem.form + problem.form.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sym, mass_);
        if (ges.info() != Eigen::Success) throw NumericalError("Propagator: generalized eigensolver failed");
        eigenvalues_ = ges.eigenvalues();
        eigenvectors_ = ges.eigenvectors();
    } else {
        generator_ = Eigen::PartialPivLU<Eigen::MatrixXd>(mass_).solve(problem.form);
    }
}

Eigen::MatrixXd Propagator::at(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("matrix_semigroup: t must be >= 0");
    const int n = size();
    if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
    if (self_adjoint_) {
        const Eigen::VectorXd decay = (-t * eigenvalues_).array().exp();
        return eigenvectors_ * decay.asDiagonal() * (eigenvectors_.transpose() * mass_);
    }
    const Eigen::MatrixXd arg = -t * generator_;
    return arg.exp();
}

double Propagator::m_norm(double t) const {
    if (self_adjoint_) return (-t * eigenvalues_).array().exp().maxCoeff();
    return m_weighted_norm(at(t), mass_);
}

double Propagator::l2_to_linf(double t) const {
    if (!(t > 0.0)) throw InvalidArgument("l2_to_linf_norm: t must be positive");
    return max_row_norm(right_divide_lt(at(t), mass_chol_));
}

Eigen::MatrixXd matrix_semigroup(const AssembledProblem& problem, double t) { return Propagator(problem).at(t); }

double m_weighted_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mass) {
    const Eigen::MatrixXd l = lower_cholesky(mass);
    const Eigen::MatrixXd y = l.transpose() * right_divide_lt(x, l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y.transpose() * y, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Eigen::VectorXd resolvent(const AssembledProblem& problem, double lambda, const Eigen::VectorXd& f) {
    if (f.size() != problem.size()) throw InvalidArgument("resolvent: f has wrong length");
    const double omega = problem.garding ? problem.garding->omega : garding_constants(problem).omega;
    const double lambda0 = omega + 1.0;
    const Eigen::MatrixXd a = lambda * problem.mass + problem.form;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rcond() < 1e-14) {
        std::ostringstream msg;
        msg << "resolvent: lambda = " << lambda << " is (numerically) in the spectrum; lambda >= " << lambda0
            << " is admissible";
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXd rhs = problem.mass * f;
    Eigen::VectorXd u = lu.solve(rhs);
    for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd r = rhs - a * u;
        if (r.norm() <= 1e-14 * std::max(1.0, rhs.norm())) break;
        u += lu.solve(r);
    }
    return u;
}

double l2_to_linf_norm(const AssembledProblem& problem, double t) { return Propagator(problem).l2_to_linf(t); }

double resolution_floor(const Mesh& mesh) {
    const double h = mesh.max_edge_length();
    return 4.0 * h * h;
}

UltraFit fit_ultracontractivity(const AssembledProblem& problem, std::span<const double> ts) {
    UltraFit fit;
    fit.resolution_floor = resolution_floor(problem.mesh);
    if (ts.size() < 5) throw InvalidArgument("fit_ultracontractivity: need at least 5 sample times");
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    if (!(*lo > 0.0) || *hi > 1.0) throw InvalidArgument("fit_ultracontractivity: sample times must lie in (0, 1]");
    if (*hi < 10.0 * *lo * (1.0 - 1e-12)) throw InvalidArgument("fit_ultracontractivity: samples must span a decade");
    if (*lo < fit.resolution_floor) {
        std::ostringstream msg;
        msg << "fit_ultracontractivity: t = " << *lo << " is below the mesh resolution floor 4h^2 = "
            << fit.resolution_floor;
        throw InvalidArgument(msg.str());
    }
    const Propagator prop(problem);
    const int n = static_cast<int>(ts.size());
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
        const double norm = prop.l2_to_linf(ts[i]);
        fit.samples.emplace_back(ts[i], norm);
        x[i] = std::log(ts[i]);
        y[i] = std::log(norm);
    }
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;
    const double ss_tot = (y.array() - ym).square().sum();
    const double ss_res = (y.array() - (intercept + slope * x.array())).square().sum();
    fit.mu = -4.0 * slope;
    fit.c = std::exp(intercept);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

DominatingConstruction build_dominating_operator(const DiscreteBoundaryOperator& b, const AssembledProblem& problem) {
    if (b.size() != problem.mesh.boundary_count()) throw InvalidArgument("build_dominating_operator: size mismatch");
    DominatingConstruction out;
    const Eigen::VectorXd& w = b.weights;
    const int m = b.size();
    out.b1 = {-b.matrix.cwiseAbs(), w};
    const double b1_inf = out.b1.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    out.beta_aux = -4.0 * b1_inf;

    const DiscreteBoundaryOperator local{out.beta_aux * Eigen::MatrixXd::Identity(m, m), w};
    const AssembledProblem robin = with_boundary(problem, local, false);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(problem.size());
    bool found = false;
    for (int j = 0; j <= 40 && !found; ++j) {
        const double lambda = std::ldexp(1.0, j);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(lambda * robin.mass + robin.form);
        if (lu.rcond() < 1e-14) continue;
        Eigen::VectorXd u = lu.solve(lambda * (robin.mass * ones));
        if (u.minCoeff() >= 0.5 && u.maxCoeff() <= 2.0) {
            out.lambda = lambda;
            out.u = std::move(u);
            found = true;
        }
    }
    if (!found)
        throw NumericalError("build_dominating_operator: lambda R(lambda) 1 never entered [1/2, 2] for lambda <= 2^40");

    const Eigen::VectorXd gu = problem.trace * out.u;
    out.h = gu / gu.cwiseProduct(w).dot(gu);
    out.g = -out.beta_aux * gu + out.b1.matrix * gu;
    out.b2 = {out.b1.matrix - out.g * out.h.cwiseProduct(w).transpose(), w};

    const double scale = std::max(1.0, std::abs(out.beta_aux));
    out.domination_margin = m > 0 ? (out.b1.matrix - out.b2.matrix).minCoeff() : 0.0;
    out.b1_min_entry = m > 0 ? (-out.b1.matrix).minCoeff() : 0.0;
    out.boundary_equality_residual = (out.b2.matrix * gu - out.beta_aux * gu).cwiseAbs().maxCoeff();
    const AssembledProblem dominated = with_boundary(problem, out.b2, false);
    const Eigen::VectorXd super = out.lambda * (dominated.mass * out.u) + dominated.form * out.u;
    out.supersolution_min = super.minCoeff();
    out.postconditions_hold = out.domination_margin >= -1e-12 * scale && out.b1_min_entry >= 0.0 &&
                              out.boundary_equality_residual <= 1e-10 * scale &&
                              out.supersolution_min >= -1e-10 * std::max(1.0, out.lambda);
    return out;
}

DominationReport check_domination(const AssembledProblem& problem_b, const AssembledProblem& problem_bt,
                                  std::span<const double> ts, int trials, std::uint64_t seed) {
    if (problem_b.size() != problem_bt.size()) throw InvalidArgument("check_domination: problems differ in size");
    DominationReport report;
    report.seed = seed;
    report.worst_excess = -std::numeric_limits<double>::infinity();
    const Propagator pb(problem_b), pt(problem_bt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = problem_b.size();
    for (double t : ts) {
        const Eigen::MatrixXd eb = pb.at(t);
        const Eigen::MatrixXd et = pt.at(t);
        const double min_entry = et.minCoeff();
        if (min_entry < -1e-9 * et.cwiseAbs().maxCoeff()) {
            report.dominator_positive = false;
            if (report.holds) {
                Eigen::Index i = 0, j = 0;
                et.minCoeff(&i, &j);
                report.witness = DominationWitness{t, -1, static_cast<int>(j), static_cast<int>(i), 0.0, min_entry};
            }
            report.holds = false;
        }
        for (int trial = 0; trial < trials; ++trial) {
            Eigen::VectorXd f(n);
            for (int i = 0; i < n; ++i) f[i] = normal(rng);
            const Eigen::VectorXd lhs = (eb * f).cwiseAbs();
            const Eigen::VectorXd rhs = et * f.cwiseAbs();
            const Eigen::VectorXd excess = lhs - rhs;
            Eigen::Index node = 0;
            const double worst = excess.maxCoeff(&node);
            report.worst_excess = std::max(report.worst_excess, worst);
            if (worst > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()) && report.holds) {
                report.holds = false;
                report.witness = DominationWitness{t, trial, -1, static_cast<int>(node), lhs[node], rhs[node]};
            }
        }
        // Hat functions: the inequality for every f is the entrywise bound |E_B| <= E_Bt.
        Eigen::Index node = 0, basis = 0;
        const double worst = (eb.cwiseAbs() - et).maxCoeff(&node, &basis);
        report.worst_excess = std::max(report.worst_excess, worst);
        if (worst > 1e-9 * std::max(1.0, et.col(basis).cwiseAbs().maxCoeff()) && report.holds) {
            report.holds = false;
            report.witness = DominationWitness{t, -1, static_cast<int>(basis), static_cast<int>(node),
                                               std::abs(eb(node, basis)), et(node, basis)};
        }
    }
    return report;
}

double intrinsic_ultracontractivity_constant(const Propagator& propagator, double t, const Eigen::VectorXd& phi,
                                             const Eigen::MatrixXd& mass) {
    if (phi.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd y = right_divide_lt(propagator.at(t), lower_cholesky(mass));
    return (y.rowwise().norm().array() / phi.array()).maxCoeff();
}

}  // namespace robinlab
