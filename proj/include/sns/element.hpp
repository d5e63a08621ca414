#pragma once

#include <array>
#include <cstddef>

#include "sns/mesh.hpp"

namespace sns {

using Vec2 = std::array<double, 2>;
using Bary = std::array<double, 3>;

/// Affine triangle: area, barycentric gradients, and the map from barycentric
/// to physical coordinates.
struct ElementGeometry {
  std::array<Point2, 3> vertices;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;

  ElementGeometry(const TriMesh& mesh, std::size_t triangle);
  ElementGeometry(const DofMap& dofs, std::size_t triangle);

  Point2 to_physical(const Bary& l) const {
    return {l[0] * vertices[0].x + l[1] * vertices[1].x + l[2] * vertices[2].x,
            l[0] * vertices[0].y + l[1] * vertices[1].y + l[2] * vertices[2].y};
  }
};

/// Quadratic Lagrange basis. Local nodes 0..2 are the vertices, node 3 + e is
/// the midpoint of the edge joining vertices e and (e + 1) % 3.
struct P2Basis {
  std::array<double, 6> value;
  std::array<Vec2, 6> grad;

  P2Basis(const ElementGeometry& geo, const Bary& l) {
    for (int i = 0; i < 3; ++i) {
      value[i] = l[i] * (2.0 * l[i] - 1.0);
      const double s = 4.0 * l[i] - 1.0;
      grad[i] = {s * geo.grad_lambda[i][0], s * geo.grad_lambda[i][1]};
    }
    for (int e = 0; e < 3; ++e) {
      const int a = e;
      const int b = (e + 1) % 3;
      value[3 + e] = 4.0 * l[a] * l[b];
      grad[3 + e] = {4.0 * (l[a] * geo.grad_lambda[b][0] + l[b] * geo.grad_lambda[a][0]),
                     4.0 * (l[a] * geo.grad_lambda[b][1] + l[b] * geo.grad_lambda[a][1])};
    }
  }
};

}  // namespace sns
