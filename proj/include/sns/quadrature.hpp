#pragma once

#include <array>
#include <vector>

namespace sns {

/// Quadrature on a triangle in barycentric coordinates. Weights sum to one and
/// are scaled by the element area at the point of use.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric 7-point rule, exact for polynomials of degree 5.
const QuadratureRule& default_rule();

/// Collapsed (Duffy) tensor-product Gauss-Legendre rule exact to `degree`.
QuadratureRule collapsed_gauss_rule(int degree);

/// Degree-10 rule used for closed-form references and verification.
const QuadratureRule& high_order_rule();

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sns
