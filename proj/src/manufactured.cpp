#include "sns/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sns/quadrature.hpp"

namespace sns {

namespace {

// g(s) = s^2 (1-s)^2 and its derivatives.
struct Profile {
  double g, d1, d2, d3;
  explicit Profile(double s)
      : g(s * s * (1.0 - s) * (1.0 - s)),
        d1(2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)),
        d2(2.0 - 12.0 * s + 12.0 * s * s),
        d3(-12.0 + 24.0 * s) {}
};

constexpr double kAmplitude = 128.0;

}  // namespace

ExactValues exact_fields(double x, double y, double nu) {
  const Profile gx(x);
  const Profile gy(y);
  const double pi = std::numbers::pi;
  ExactValues v;
  v.u = {kAmplitude * gx.g * gy.d1, -kAmplitude * gx.d1 * gy.g};
  v.grad_u[0] = {kAmplitude * gx.d1 * gy.d1, kAmplitude * gx.g * gy.d2};
  v.grad_u[1] = {-kAmplitude * gx.d2 * gy.g, -kAmplitude * gx.d1 * gy.d1};
  v.laplacian_u = {kAmplitude * (gx.d2 * gy.d1 + gx.g * gy.d3),
                   -kAmplitude * (gx.d3 * gy.g + gx.d1 * gy.d2)};
  v.p = std::sin(pi * x) * std::sin(pi * y);
  v.grad_p = {pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y)};
  for (int i = 0; i < 2; ++i) {
    v.force[i] = -nu * v.laplacian_u[i] + v.u[0] * v.grad_u[i][0] + v.u[1] * v.grad_u[i][1] +
                 v.grad_p[i];
  }
  return v;
}

Vec2 ExactSolution::velocity(double x, double y) {
  const Profile gx(x);
  const Profile gy(y);
  return {kAmplitude * gx.g * gy.d1, -kAmplitude * gx.d1 * gy.g};
}

double ExactSolution::pressure(double x, double y) {
  return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

double ExactSolution::pressure_mean() { return 4.0 / (std::numbers::pi * std::numbers::pi); }

double l2_error(const FEField& field, const VectorFunction& reference) {
  const DofMap& dofs = field.dofs();
  const QuadratureRule& rule = high_order_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = geo.to_physical(rule.points[q]);
      const Vec2 uh = field.velocity_at(t, rule.points[q]);
      const Vec2 u = reference(x.x, x.y);
      const double dx = uh[0] - u[0];
      const double dy = uh[1] - u[1];
      sum += rule.weights[q] * geo.area * (dx * dx + dy * dy);
    }
  }
  return std::sqrt(sum);
}

double l2_error(const FEField& field, const FEField& reference) {
  if (!field.same_layout(reference)) {
    throw std::invalid_argument("l2_error: fields live on different dof maps");
  }
  const FEField diff = field - reference;
  return velocity_l2_norm(diff);
}

double velocity_l2_norm(const FEField& field) {
  const DofMap& dofs = field.dofs();
  const QuadratureRule& rule = default_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 u = field.velocity_at(t, rule.points[q]);
      sum += rule.weights[q] * geo.area * (u[0] * u[0] + u[1] * u[1]);
    }
  }
  return std::sqrt(sum);
}

double pressure_l2_error(const FEField& field, const ScalarFunction& reference) {
  const DofMap& dofs = field.dofs();
  const QuadratureRule& rule = high_order_rule();
  double mean_h = 0.0;
  double mean_ref = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = geo.to_physical(rule.points[q]);
      const double w = rule.weights[q] * geo.area;
      mean_h += w * field.pressure_at(t, rule.points[q]);
      mean_ref += w * reference(x.x, x.y);
    }
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = geo.to_physical(rule.points[q]);
      const double d = (field.pressure_at(t, rule.points[q]) - mean_h) -
                       (reference(x.x, x.y) - mean_ref);
      sum += rule.weights[q] * geo.area * d * d;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const DofMap& dofs, const VectorFunction& f) {
  const QuadratureRule& rule = high_order_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = geo.to_physical(rule.points[q]);
      const Vec2 v = f(x.x, x.y);
      sum += rule.weights[q] * geo.area * (v[0] * v[0] + v[1] * v[1]);
    }
  }
  return std::sqrt(sum);
}

}  // namespace sns
