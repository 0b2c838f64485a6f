#pragma once

#include <array>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace robinlab {

/// Planar coordinates; interval meshes leave the second component at zero.
using Point = std::array<double, 2>;

enum class SymmetryKind { Reflection, Cyclic, Dihedral };

/// Finite group a mesh is invariant under. `order` is the number of rotations
/// (n for C_n and D_n); it is 2 for the 1D reflection.
struct SymmetryTag {
    SymmetryKind kind = SymmetryKind::Reflection;
    int order = 2;
};

/// How each annular quad of the polar disk mesh is split into two triangles.
/// Rotational uses the same diagonal in every sector (exact C_{n_theta} symmetry);
/// Alternating flips it in odd sectors (exact D_{n_theta/2} symmetry).
enum class DiskTriangulation { Rotational, Alternating };

struct DiskLayout {
    int n_r = 0;
    int n_theta = 0;
    DiskTriangulation triangulation = DiskTriangulation::Rotational;

    /// Vertex index of ring `ring` (1..n_r) at angular position `k` (taken mod n_theta).
    int vertex(int ring, int k) const;
};

/// P1 mesh of the interval or the unit disk. Immutable after construction.
///
/// Boundary nodes are ordered: {a, b} for the interval, increasing angle
/// 2*pi*k/n_theta for the disk. Boundary weights are the lumped boundary measure
/// (counting measure in 1D, exact arc length 2*pi/n_theta on the circle).
struct Mesh {
    int dim = 1;
    std::vector<Point> vertices;
    std::vector<std::vector<int>> cells;
    std::vector<int> boundary_nodes;
    std::vector<double> boundary_weights;
    std::optional<SymmetryTag> symmetry_tag;
    std::optional<DiskLayout> disk;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int boundary_count() const { return static_cast<int>(boundary_nodes.size()); }
    double boundary_measure() const;
    double cell_volume(int cell) const;
    double volume() const;
    double max_edge_length() const;

    /// Angle of boundary node at position k; disk meshes only.
    double boundary_angle(int k) const;

    /// For each vertex: its position in boundary_nodes, or -1 for interior vertices.
    std::vector<int> boundary_position() const;

    /// Vertex adjacency (vertices sharing a cell), sorted, without self.
    std::vector<std::vector<int>> adjacency() const;
};

Mesh build_interval_mesh(double a, double b, int n, bool require_reflection = false);

Mesh build_disk_mesh(int n_r, int n_theta,
                     DiskTriangulation triangulation = DiskTriangulation::Rotational);

/// Throws InvalidArgument naming the first violated mesh invariant.
void validate_mesh(const Mesh& mesh);

/// Vertex permutation of a rotation by `steps` * 2*pi/n_theta: entry i is the
/// index of the image of vertex i.
std::vector<int> disk_rotation_permutation(const Mesh& mesh, int steps);

nlohmann::json mesh_to_json(const Mesh& mesh);

}  // namespace robinlab
