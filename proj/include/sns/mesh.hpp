#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace sns {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Conforming triangulation of the unit square.
///
/// Triangles are stored counter-clockwise. Local edge `e` of a triangle joins
/// local vertices `e` and `(e + 1) % 3`; `triangle_edges[t][e]` is its global
/// edge index. Edge midpoints are stored once so that P2 node coordinates are
/// identical wherever they are used.
struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<Point2> edge_midpoints;
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;
  /// Longest edge (the diagonal), sqrt(2) / n.
  double h = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  double signed_area(std::size_t t) const;
};

/// Uniform n x n grid of squares, each split along the diagonal from its
/// lower-left to its upper-right corner. Throws std::invalid_argument for n < 1.
TriMesh build_structured_mesh(int n);

/// Result of a structural audit; `ok()` iff every check passed.
struct MeshAudit {
  bool coordinates_in_domain = true;
  bool positive_orientation = true;
  bool edge_sharing = true;
  bool boundary_flags_consistent = true;
  long euler_characteristic = 0;

  bool ok() const {
    return coordinates_in_domain && positive_orientation && edge_sharing &&
           boundary_flags_consistent && euler_characteristic == 1;
  }
};

MeshAudit audit_mesh(const TriMesh& mesh);

/// Taylor-Hood (vector P2 / scalar P1) degree-of-freedom layout.
///
/// P2 nodes are numbered vertices first, then edges. Velocity dof of node `k`
/// and component `c` is `c * num_nodes + k`. Pressure dofs coincide with the
/// vertex numbering. In the assembled saddle system the unknown vector is
/// [velocity | pressure | gauge multiplier].
class DofMap {
 public:
  static constexpr int kNodesPerElement = 6;

  explicit DofMap(const TriMesh& mesh);

  int num_nodes() const { return num_nodes_; }
  int num_velocity_dofs() const { return 2 * num_nodes_; }
  int num_pressure_dofs() const { return num_pressure_; }
  /// velocity + pressure + one gauge multiplier
  int num_system_dofs() const { return num_velocity_dofs() + num_pressure_ + 1; }
  int pressure_offset() const { return num_velocity_dofs(); }
  int gauge_index() const { return num_velocity_dofs() + num_pressure_; }

  /// Global P2 node of local node `local` (0..2 vertices, 3..5 edges).
  int node(std::size_t triangle, int local) const { return element_nodes_[triangle][local]; }
  int velocity_dof(std::size_t triangle, int local, int component) const {
    return component * num_nodes_ + node(triangle, local);
  }
  int pressure_dof(std::size_t triangle, int local) const {
    return pressure_nodes_[triangle][local];
  }

  const std::vector<bool>& dirichlet_mask() const { return dirichlet_; }
  int num_dirichlet() const { return num_dirichlet_; }

  /// Coordinates of P2 node `k` (vertex or stored edge midpoint).
  Point2 node_coordinate(int k) const { return coordinates_[k]; }

  std::size_t num_triangles() const { return element_nodes_.size(); }

 private:
  int num_nodes_ = 0;
  int num_pressure_ = 0;
  int num_dirichlet_ = 0;
  std::vector<std::array<int, kNodesPerElement>> element_nodes_;
  std::vector<std::array<int, 3>> pressure_nodes_;
  std::vector<bool> dirichlet_;
  std::vector<Point2> coordinates_;
};

DofMap build_dof_map(const TriMesh& mesh);

/// CSV dump with `# vertices`, `# triangles` and `# edges` sections.
void write_mesh_csv(std::ostream& out, const TriMesh& mesh);

}  // namespace sns
