#pragma once

#include <cmath>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_ops.hpp"
#include "robinlab/geometry.hpp"

namespace robinlab::testing {

inline Eigen::MatrixXd two_point(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

/// B = b [[-2, 1], [1, -2]] on the two endpoints.
inline BoundaryOperatorSpec interval_example(double b) { return spec::ExplicitMatrix{b * two_point(-2, 1, 1, -2)}; }

inline BoundaryOperatorSpec rank_one_cos() {
    return spec::RankOne{[](const Point& p) { return p[0]; }};  // boundary nodes lie on the unit circle
}

inline AssembledProblem problem_on(const Mesh& mesh, const BoundaryOperatorSpec& s, bool garding = true) {
    AssemblyOptions opt;
    opt.compute_garding = garding;
    return assemble(mesh, CoefficientField::identity(), discretize_boundary_operator(s, mesh), opt);
}

inline AssembledProblem interval_problem(int n, const BoundaryOperatorSpec& s, bool garding = true) {
    return problem_on(build_interval_mesh(-1.0, 1.0, n), s, garding);
}

inline AssembledProblem disk_problem(int n_r, int n_theta, const BoundaryOperatorSpec& s, bool garding = true) {
    return problem_on(build_disk_mesh(n_r, n_theta), s, garding);
}

}  // namespace robinlab::testing
