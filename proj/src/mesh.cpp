#include "sns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace sns {

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point2& a = vertices[tri[0]];
  const Point2& b = vertices[tri[1]];
  const Point2& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

bool on_boundary(const Point2& p) {
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

void build_edges(TriMesh& mesh) {
  std::map<std::pair<int, int>, int> lookup;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second},
                                               static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({key.first, key.second});
        const Point2& pa = mesh.vertices[key.first];
        const Point2& pb = mesh.vertices[key.second];
        mesh.edge_midpoints.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
      }
      mesh.triangle_edges[t][e] = it->second;
    }
  }

  mesh.boundary_edge.assign(mesh.edges.size(), false);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Point2& a = mesh.vertices[mesh.edges[e][0]];
    const Point2& b = mesh.vertices[mesh.edges[e][1]];
    mesh.boundary_edge[e] = (a.x == 0.0 && b.x == 0.0) || (a.x == 1.0 && b.x == 1.0) ||
                            (a.y == 0.0 && b.y == 0.0) || (a.y == 1.0 && b.y == 1.0);
  }

}

}  // namespace

TriMesh build_structured_mesh(int n) {
  if (n < 1) {
    throw std::invalid_argument("build_structured_mesh: n must be >= 1, got " + std::to_string(n));
  }
  TriMesh mesh;
  const int stride = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  mesh.boundary_vertex.resize(mesh.vertices.size());
  std::transform(mesh.vertices.begin(), mesh.vertices.end(), mesh.boundary_vertex.begin(),
                 on_boundary);

  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * stride + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + stride;
      const int v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  build_edges(mesh);
  // diagonal length
  mesh.h = std::sqrt(2.0) / n;
  return mesh;
}

MeshAudit audit_mesh(const TriMesh& mesh) {
  MeshAudit audit;
  constexpr double tol = 1e-14;
  for (const Point2& p : mesh.vertices) {
    if (p.x < -tol || p.x > 1.0 + tol || p.y < -tol || p.y > 1.0 + tol) {
      audit.coordinates_in_domain = false;
    }
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) audit.positive_orientation = false;
  }

  std::vector<int> share(mesh.num_edges(), 0);
  for (const auto& te : mesh.triangle_edges) {
    for (int e : te) ++share[e];
  }
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const int expected = mesh.boundary_edge[e] ? 1 : 2;
    if (share[e] != expected) audit.edge_sharing = false;
    if (mesh.boundary_edge[e] && !(mesh.boundary_vertex[mesh.edges[e][0]] &&
                                   mesh.boundary_vertex[mesh.edges[e][1]])) {
      audit.boundary_flags_consistent = false;
    }
  }
  audit.euler_characteristic = static_cast<long>(mesh.num_vertices()) -
                               static_cast<long>(mesh.num_edges()) +
                               static_cast<long>(mesh.num_triangles());
  return audit;
}

DofMap::DofMap(const TriMesh& mesh)
    : num_nodes_(static_cast<int>(mesh.num_vertices() + mesh.num_edges())),
      num_pressure_(static_cast<int>(mesh.num_vertices())) {
  const int nv = static_cast<int>(mesh.num_vertices());
  element_nodes_.resize(mesh.num_triangles());
  pressure_nodes_.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      element_nodes_[t][k] = mesh.triangles[t][k];
      element_nodes_[t][3 + k] = nv + mesh.triangle_edges[t][k];
      pressure_nodes_[t][k] = mesh.triangles[t][k];
    }
  }

  coordinates_ = mesh.vertices;
  coordinates_.insert(coordinates_.end(), mesh.edge_midpoints.begin(), mesh.edge_midpoints.end());

  dirichlet_.assign(num_velocity_dofs(), false);
  for (int k = 0; k < num_nodes_; ++k) {
    const bool boundary = k < nv ? mesh.boundary_vertex[k] : mesh.boundary_edge[k - nv];
    if (!boundary) continue;
    dirichlet_[k] = true;
    dirichlet_[num_nodes_ + k] = true;
    num_dirichlet_ += 2;
  }
}

DofMap build_dof_map(const TriMesh& mesh) { return DofMap(mesh); }

void write_mesh_csv(std::ostream& out, const TriMesh& mesh) {
  out.precision(17);
  out << "# vertices\nindex,x,y,boundary\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    out << i << ',' << mesh.vertices[i].x << ',' << mesh.vertices[i].y << ','
        << (mesh.boundary_vertex[i] ? 1 : 0) << '\n';
  }
  out << "# triangles\nindex,v0,v1,v2,e0,e1,e2\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& te = mesh.triangle_edges[t];
    out << t << ',' << tri[0] << ',' << tri[1] << ',' << tri[2] << ',' << te[0] << ',' << te[1]
        << ',' << te[2] << '\n';
  }
  out << "# edges\nindex,v0,v1,mx,my,boundary\n";
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    out << e << ',' << mesh.edges[e][0] << ',' << mesh.edges[e][1] << ','
        << mesh.edge_midpoints[e].x << ',' << mesh.edge_midpoints[e].y << ','
        << (mesh.boundary_edge[e] ? 1 : 0) << '\n';
  }
}

}  // namespace sns
