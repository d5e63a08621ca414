#include "sns/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sns {

namespace {

QuadratureRule make_seven_point() {
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0;
  const double b = (6.0 + s15) / 21.0;
  const double wa = (155.0 - s15) / 1200.0;
  const double wb = (155.0 + s15) / 1200.0;

  QuadratureRule rule;
  rule.degree = 5;
  rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                 {a, a, 1.0 - 2.0 * a},
                 {a, 1.0 - 2.0 * a, a},
                 {1.0 - 2.0 * a, a, a},
                 {b, b, 1.0 - 2.0 * b},
                 {b, 1.0 - 2.0 * b, b},
                 {1.0 - 2.0 * b, b, b}};
  rule.weights = {9.0 / 40.0, wa, wa, wa, wb, wb, wb};
  return rule;
}

}  // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = n == 1 ? x : p1;
    const double pnm1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule collapsed_gauss_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("collapsed_gauss_rule: negative degree");
  const int n = (degree + 3) / 2;  // 2n - 1 >= degree + 1
  std::vector<double> t;
  std::vector<double> w;
  gauss_legendre_unit(n, t, w);

  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = t[i];
      const double y = t[j] * (1.0 - t[i]);
      // Reference triangle has area 1/2; normalize weights to sum to one.
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * w[i] * w[j] * (1.0 - t[i]));
    }
  }
  return rule;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = make_seven_point();
  return rule;
}

const QuadratureRule& high_order_rule() {
  static const QuadratureRule rule = collapsed_gauss_rule(10);
  return rule;
}

}  // namespace sns
