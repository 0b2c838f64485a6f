#include "robinlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "robinlab/errors.hpp"

namespace robinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double distance(const Point& p, const Point& q) { return std::hypot(p[0] - q[0], p[1] - q[1]); }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

}  // namespace

int DiskLayout::vertex(int ring, int k) const {
    if (ring == 0) return 0;
    const int kk = ((k % n_theta) + n_theta) % n_theta;
    return 1 + (ring - 1) * n_theta + kk;
}

double Mesh::boundary_measure() const {
    double total = 0.0;
    for (double w : boundary_weights) total += w;
    return total;
}

double Mesh::cell_volume(int cell) const {
    const auto& c = cells.at(static_cast<std::size_t>(cell));
    if (dim == 1) return std::abs(vertices[c[1]][0] - vertices[c[0]][0]);
    return std::abs(signed_area(vertices[c[0]], vertices[c[1]], vertices[c[2]]));
}

double Mesh::volume() const {
    double total = 0.0;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) total += cell_volume(c);
    return total;
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& c : cells) {
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                h = std::max(h, distance(vertices[c[i]], vertices[c[j]]));
    }
    return h;
}

double Mesh::boundary_angle(int k) const {
    if (!disk) throw InvalidArgument("boundary_angle: mesh is not a disk");
    return kTwoPi * static_cast<double>(k) / static_cast<double>(disk->n_theta);
}

std::vector<int> Mesh::boundary_position() const {
    std::vector<int> pos(vertices.size(), -1);
    for (int k = 0; k < boundary_count(); ++k) pos[boundary_nodes[k]] = k;
    return pos;
}

std::vector<std::vector<int>> Mesh::adjacency() const {
    std::vector<std::set<int>> nbrs(vertices.size());
    for (const auto& c : cells)
        for (int i : c)
            for (int j : c)
                if (i != j) nbrs[i].insert(j);
    std::vector<std::vector<int>> out(vertices.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) out[i].assign(nbrs[i].begin(), nbrs[i].end());
    return out;
}

Mesh build_interval_mesh(double a, double b, int n, bool require_reflection) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidArgument("build_interval_mesh: endpoints must be finite");
    if (!(a < b)) throw InvalidArgument("build_interval_mesh: need a < b");
    if (n < 2) throw InvalidArgument("build_interval_mesh: need n >= 2 cells");
    const bool symmetric = (a == -b);
    if (require_reflection && !symmetric)
        throw InvalidArgument("build_interval_mesh: reflection requested but the interval is not symmetric about 0");

    Mesh mesh;
    mesh.dim = 1;
    mesh.vertices.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        // Fill from both ends so that symmetric intervals get exactly mirrored nodes.
        const double x = (2 * i <= n) ? a + (b - a) * i / n : b - (b - a) * (n - i) / n;
        mesh.vertices[i] = {x, 0.0};
    }
    if (symmetric) {
        for (int i = 0; 2 * i < n; ++i) mesh.vertices[n - i][0] = -mesh.vertices[i][0];
        if (n % 2 == 0) mesh.vertices[n / 2][0] = 0.0;
    }
    for (int i = 0; i < n; ++i) mesh.cells.push_back({i, i + 1});
    mesh.boundary_nodes = {0, n};
    mesh.boundary_weights = {1.0, 1.0};
    if (symmetric) mesh.symmetry_tag = SymmetryTag{SymmetryKind::Reflection, 2};
    return mesh;
}

Mesh build_disk_mesh(int n_r, int n_theta, DiskTriangulation triangulation) {
    if (n_r < 2) throw InvalidArgument("build_disk_mesh: need n_r >= 2");
    if (n_theta < 8) throw InvalidArgument("build_disk_mesh: need n_theta >= 8");
    if (n_theta % 2 != 0) throw InvalidArgument("build_disk_mesh: n_theta must be even");
    if (triangulation == DiskTriangulation::Alternating && n_theta % 4 != 0)
        throw InvalidArgument("build_disk_mesh: alternating triangulation needs n_theta divisible by 4");

    Mesh mesh;
    mesh.dim = 2;
    DiskLayout layout{n_r, n_theta, triangulation};
    mesh.disk = layout;

    mesh.vertices.push_back({0.0, 0.0});
    for (int j = 1; j <= n_r; ++j) {
        const double r = (j == n_r) ? 1.0 : static_cast<double>(j) / n_r;
        for (int k = 0; k < n_theta; ++k) {
            const double theta = kTwoPi * k / n_theta;
            mesh.vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
        }
    }

    auto add_triangle = [&](int p, int q, int s) {
        if (signed_area(mesh.vertices[p], mesh.vertices[q], mesh.vertices[s]) < 0) std::swap(q, s);
        mesh.cells.push_back({p, q, s});
    };
    for (int k = 0; k < n_theta; ++k) add_triangle(0, layout.vertex(1, k), layout.vertex(1, k + 1));
    for (int j = 1; j < n_r; ++j) {
        for (int k = 0; k < n_theta; ++k) {
            const int a = layout.vertex(j, k), b = layout.vertex(j, k + 1);
            const int c = layout.vertex(j + 1, k), d = layout.vertex(j + 1, k + 1);
            const bool flip = triangulation == DiskTriangulation::Alternating && (k % 2 == 1);
            if (!flip) {
                add_triangle(a, c, d);
                add_triangle(a, d, b);
            } else {
                add_triangle(a, c, b);
                add_triangle(b, c, d);
            }
        }
    }

    for (int k = 0; k < n_theta; ++k) {
        mesh.boundary_nodes.push_back(layout.vertex(n_r, k));
        mesh.boundary_weights.push_back(kTwoPi / n_theta);
    }
    mesh.symmetry_tag = triangulation == DiskTriangulation::Rotational
                            ? SymmetryTag{SymmetryKind::Cyclic, n_theta}
                            : SymmetryTag{SymmetryKind::Dihedral, n_theta / 2};
    return mesh;
}

std::vector<int> disk_rotation_permutation(const Mesh& mesh, int steps) {
    if (!mesh.disk) throw InvalidArgument("disk_rotation_permutation: mesh is not a disk");
    const DiskLayout& L = *mesh.disk;
    std::vector<int> perm(mesh.vertices.size());
    perm[0] = 0;
    for (int j = 1; j <= L.n_r; ++j)
        for (int k = 0; k < L.n_theta; ++k) perm[L.vertex(j, k)] = L.vertex(j, k + steps);
    return perm;
}

void validate_mesh(const Mesh& mesh) {
    if (mesh.dim != 1 && mesh.dim != 2) throw InvalidArgument("mesh: dim must be 1 or 2");
    if (mesh.boundary_nodes.size() != mesh.boundary_weights.size())
        throw InvalidArgument("mesh: boundary_nodes and boundary_weights differ in length");
    const std::size_t per_cell = static_cast<std::size_t>(mesh.dim) + 1;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        if (mesh.cells[c].size() != per_cell) throw InvalidArgument("mesh: cell " + std::to_string(c) + " has wrong arity");
        for (int v : mesh.cells[c])
            if (v < 0 || v >= mesh.vertex_count())
                throw InvalidArgument("mesh: cell " + std::to_string(c) + " references a missing vertex");
        if (!(mesh.cell_volume(static_cast<int>(c)) > 0.0))
            throw InvalidArgument("mesh: cell " + std::to_string(c) + " has non-positive volume");
    }
    double exact_measure = 0.0;
    if (mesh.dim == 1) {
        double lo = mesh.vertices.front()[0], hi = lo;
        for (const auto& p : mesh.vertices) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        for (int v : mesh.boundary_nodes)
            if (mesh.vertices[v][0] != lo && mesh.vertices[v][0] != hi)
                throw InvalidArgument("mesh: boundary node " + std::to_string(v) + " is not an endpoint");
        exact_measure = 2.0;
    } else {
        for (int v : mesh.boundary_nodes) {
            const double r = std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]);
            if (std::abs(r - 1.0) > 1e-12)
                throw InvalidArgument("mesh: boundary node " + std::to_string(v) + " is off the unit circle");
        }
        exact_measure = kTwoPi;
    }
    if (std::abs(mesh.boundary_measure() - exact_measure) > 1e-10 * exact_measure)
        throw InvalidArgument("mesh: boundary weights do not sum to the boundary measure");
    if (mesh.symmetry_tag && mesh.symmetry_tag->kind == SymmetryKind::Cyclic) {
        const auto perm = disk_rotation_permutation(mesh, mesh.disk->n_theta / mesh.symmetry_tag->order);
        const double angle = kTwoPi / mesh.symmetry_tag->order;
        const double c = std::cos(angle), s = std::sin(angle);
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            const Point& p = mesh.vertices[i];
            const Point rotated{c * p[0] - s * p[1], s * p[0] + c * p[1]};
            if (distance(rotated, mesh.vertices[perm[i]]) > 1e-12)
                throw InvalidArgument("mesh: rotation does not map vertex " + std::to_string(i) + " onto the mesh");
        }
    }
}

nlohmann::json mesh_to_json(const Mesh& mesh) {
    nlohmann::json j;
    j["dim"] = mesh.dim;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const auto& p : mesh.vertices) {
        if (mesh.dim == 1)
            verts.push_back(nlohmann::json::array({p[0]}));
        else
            verts.push_back(nlohmann::json::array({p[0], p[1]}));
    }
    j["cells"] = mesh.cells;
    j["boundary_nodes"] = mesh.boundary_nodes;
    j["boundary_weights"] = mesh.boundary_weights;
    return j;
}

}  // namespace robinlab
