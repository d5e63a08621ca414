#include "sns/element.hpp"

namespace sns {

namespace {

void init(ElementGeometry& geo) {
  const auto& vertices = geo.vertices;
  const Point2& p0 = vertices[0];
  const Point2& p1 = vertices[1];
  const Point2& p2 = vertices[2];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  geo.area = 0.5 * det;
  geo.grad_lambda[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
  geo.grad_lambda[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
  geo.grad_lambda[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
}

}  // namespace

ElementGeometry::ElementGeometry(const TriMesh& mesh, std::size_t triangle) {
  const auto& tri = mesh.triangles[triangle];
  for (int k = 0; k < 3; ++k) vertices[k] = mesh.vertices[tri[k]];
  init(*this);
}

ElementGeometry::ElementGeometry(const DofMap& dofs, std::size_t triangle) {
  for (int k = 0; k < 3; ++k) vertices[k] = dofs.node_coordinate(dofs.node(triangle, k));
  init(*this);
}

}  // namespace sns
