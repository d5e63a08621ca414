#pragma once

#include <array>

#include "sns/element.hpp"
#include "sns/field.hpp"

namespace sns {

/// Closed-form test flow on the unit square, with stream function
/// psi = 128 x^2 (1-x)^2 y^2 (1-y)^2:
///   u1 = 64 x^2 (1-x)^2 (4-8y) y (1-y)
///   u2 = -64 (4-8x) x (1-x) y^2 (1-y)^2
///   p  = sin(pi x) sin(pi y)
struct ExactValues {
  Vec2 u;
  double p = 0.0;
  Vec2 force;
  /// grad_u[i][j] = d u_i / d x_j
  std::array<Vec2, 2> grad_u;
  Vec2 laplacian_u;
  Vec2 grad_p;
};

/// Exact fields and the matched body force F = -nu lap u + (u . grad) u + grad p.
/// All derivatives are analytic.
ExactValues exact_fields(double x, double y, double nu);

struct ExactSolution {
  static Vec2 velocity(double x, double y);
  static double pressure(double x, double y);
  /// Mean of p over the unit square, 4 / pi^2.
  static double pressure_mean();
};

/// Body force matched to the exact solution for a fixed viscosity.
struct ForcingSpec {
  double nu = 0.02;
  Vec2 operator()(double x, double y) const { return exact_fields(x, y, nu).force; }
};

/// L2 norm of the velocity difference against a closed-form field (degree-10 rule).
double l2_error(const FEField& field, const VectorFunction& reference);
/// L2 norm of the velocity difference between two fields on the same dofs
/// (degree-5 rule, exact for P2 differences). Mismatched dof maps throw.
double l2_error(const FEField& field, const FEField& reference);
/// L2 norm of the FE velocity.
double velocity_l2_norm(const FEField& field);
/// L2 error of the pressure against a closed-form pressure after removing the
/// mean of each (the discrete pressure is normalized to zero mean).
double pressure_l2_error(const FEField& field, const ScalarFunction& reference);
/// L2 norm of a closed-form vector field (degree-10 rule on the given dofs' mesh).
double l2_norm(const DofMap& dofs, const VectorFunction& f);

}  // namespace sns
