#include "sns/verify.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sns/element.hpp"
#include "sns/field.hpp"
#include "sns/manufactured.hpp"
#include "sns/quadrature.hpp"
#include "sns/uq.hpp"

namespace sns {

Eigen::MatrixXd divergence_free_basis(const TriMesh& mesh, const DofMap& dofs,
                                      bool boundary_zero) {
  std::vector<bool> fixed = dofs.dirichlet_mask();
  if (!boundary_zero) fixed.assign(fixed.size(), false);
  std::vector<int> column(dofs.num_velocity_dofs(), -1);
  std::vector<int> free_dofs;
  for (int i = 0; i < dofs.num_velocity_dofs(); ++i) {
    if (!fixed[i]) {
      column[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(i);
    }
  }
  const int rows = 3 * static_cast<int>(dofs.num_triangles());
  Eigen::MatrixXd div = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(free_dofs.size()));
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    for (int i = 0; i < 3; ++i) {
      Bary l{0.0, 0.0, 0.0};
      l[i] = 1.0;
      const P2Basis basis(geo, l);
      const int row = 3 * static_cast<int>(t) + i;
      for (int a = 0; a < 6; ++a) {
        for (int c = 0; c < 2; ++c) {
          const int col = column[dofs.velocity_dof(t, a, c)];
          if (col >= 0) div(row, col) += mesh.h * basis.grad[a][c];
        }
      }
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(div, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = 1e-10 * (s.size() ? s[0] : 1.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff) ++rank;
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(div.cols() - rank);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dofs.num_velocity_dofs(), kernel.cols());
  for (std::size_t j = 0; j < free_dofs.size(); ++j) basis.row(free_dofs[j]) = kernel.row(j);
  return basis;
}

TrilinearCheck check_trilinear_identities(int n, int fields, std::uint64_t seed,
                                          ConvectionOptions options) {
  const TriMesh mesh = build_structured_mesh(n);
  const DofMap dofs(mesh);
  Eigen::MatrixXd basis = divergence_free_basis(mesh, dofs, true);
  TrilinearCheck out;
  out.n = n;
  if (basis.cols() == 0) {
    basis = divergence_free_basis(mesh, dofs, false);
    out.w_boundary_zero = false;
  }
  out.kernel_dim = static_cast<int>(basis.cols());
  if (basis.cols() == 0) return out;

  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(n));
  std::normal_distribution<double> normal;
  const auto random_free = [&] {
    Eigen::VectorXd x(dofs.num_velocity_dofs());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double z = normal(rng);
      x[i] = dofs.dirichlet_mask()[i] ? 0.0 : z;
    }
    return x;
  };
  const Eigen::VectorXd no_pressure = Eigen::VectorXd::Zero(dofs.num_pressure_dofs());
  const auto norm = [&](const Eigen::VectorXd& x) {
    return velocity_l2_norm(FEField(dofs, x, no_pressure));
  };

  for (int f = 0; f < fields; ++f) {
    Eigen::VectorXd coeff(basis.cols());
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = normal(rng);
    const Eigen::VectorXd w = basis * coeff;
    const Eigen::VectorXd u = random_free();
    const Eigen::VectorXd v = random_free();
    const double nw = norm(w);
    const double nu = norm(u);
    const double nv = norm(v);

    const SparseOperator n1 = assemble_convection_linearized(mesh, dofs, w, options).first;
    out.max_self = std::max(out.max_self, std::abs(n1.bilinear(v, v)) / (nw * nv * nv));
    const double skew = n1.bilinear(u, v) + n1.bilinear(v, u);
    out.max_skew = std::max(out.max_skew, std::abs(skew) / (nw * nu * nv));

    const Eigen::VectorXd action = convection_action(mesh, dofs, w, u);
    const double gap = (n1.apply(u) - action).lpNorm<Eigen::Infinity>();
    out.max_action_gap =
        std::max(out.max_action_gap, gap / std::max(action.lpNorm<Eigen::Infinity>(), 1e-300));
    ++out.fields;
  }
  return out;
}

QuadratureCheck check_quadrature(const QuadratureRule& rule) {
  QuadratureCheck out;
  out.degree = rule.degree;
  for (int a = 0; a <= rule.degree; ++a) {
    for (int b = 0; a + b <= rule.degree; ++b) {
      // int_T x^a y^b = a! b! / (a + b + 2)! on the unit reference triangle.
      const double exact = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
      }
      out.max_error = std::max(out.max_error, std::abs(0.5 * sum - exact));
    }
  }
  return out;
}

double observed_order(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) {
    throw std::invalid_argument("observed_order: need at least two (h, error) pairs");
  }
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const std::vector<int>& sizes, double nu,
                                   const NewtonConfig& newton) {
  ConvergenceStudy study;
  for (int n : sizes) {
    const TriMesh mesh = build_structured_mesh(n);
    const DofMap dofs(mesh);
    const FlowSolver solver(mesh, dofs, ProblemParams{nu, 0.0});
    const Eigen::VectorXd load = assemble_load(mesh, dofs, ForcingSpec{nu});
    const Solved<FEField> xi = solver.solve_deterministic(load, newton);
    ConvergenceRow row;
    row.n = n;
    row.h = mesh.h;
    row.velocity_error = l2_error(xi.field, VectorFunction(&ExactSolution::velocity));
    row.pressure_error = pressure_l2_error(xi.field, ScalarFunction(&ExactSolution::pressure));
    row.newton_iterations = xi.report.iterations;
    study.rows.push_back(row);
  }
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const auto& c = study.rows[i - 1];
    const auto& f = study.rows[i];
    const double dh = std::log(c.h / f.h);
    study.velocity_orders.push_back(std::log(c.velocity_error / f.velocity_error) / dh);
    study.pressure_orders.push_back(std::log(c.pressure_error / f.pressure_error) / dh);
  }
  if (study.rows.size() >= 2) {
    std::vector<double> h, eu, ep;
    for (const auto& row : study.rows) {
      h.push_back(row.h);
      eu.push_back(row.velocity_error);
      ep.push_back(row.pressure_error);
    }
    study.velocity_order = observed_order(h, eu);
    study.pressure_order = observed_order(h, ep);
  }
  return study;
}

namespace {

CheckResult bounded(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), std::isfinite(value) && value <= bound, value, bound, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), std::isfinite(value) && value >= bound, value, bound, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  std::vector<CheckResult> checks;
  checks.push_back(bounded("quadrature_degree5", check_quadrature(default_rule()).max_error, 1e-14));
  checks.push_back(
      bounded("quadrature_degree10", check_quadrature(high_order_rule()).max_error, 1e-14));

  ConvectionOptions conv;
  conv.inject_sign_error = options.mutate;
  for (int n : {2, 4, 8}) {
    const TrilinearCheck t = check_trilinear_identities(n, options.trilinear_fields, options.seed, conv);
    std::ostringstream detail;
    detail << "kernel_dim=" << t.kernel_dim << " fields=" << t.fields
           << " w_boundary=" << (t.w_boundary_zero ? "zero" : "free");
    const std::string suffix = "_n" + std::to_string(n);
    CheckResult self = bounded("trilinear_self" + suffix, t.max_self, 1e-11, detail.str());
    CheckResult skew = bounded("trilinear_skew" + suffix, t.max_skew, 1e-11, detail.str());
    if (t.fields == 0) {
      self.passed = skew.passed = false;
    }
    checks.push_back(std::move(self));
    checks.push_back(std::move(skew));
    checks.push_back(bounded("convection_action" + suffix, t.max_action_gap, 1e-12, detail.str()));
  }

  McConfig cfg;
  cfg.samples = 10;
  cfg.base_seed = options.seed;
  cfg.methods = {Method::monolithic, Method::split};
  cfg.nu = options.nu;
  cfg.jobs = options.jobs;
  const McStats stats = run_experiment(cfg);
  const MethodStats* split = stats.find(Method::split);
  const MethodStats* mono = stats.find(Method::monolithic);
  std::ostringstream detail;
  detail << "samples=" << stats.samples << " split_converged=" << split->converged
         << " monolithic_converged=" << mono->converged;
  CheckResult equiv = bounded("splitting_equivalence", stats.max_split_gap, 1e-10, detail.str());
  if (split->failed + mono->failed > 0) equiv.passed = false;
  checks.push_back(std::move(equiv));

  if (options.convergence) {
    const ConvergenceStudy study = convergence_study({4, 8, 16}, options.nu);
    std::ostringstream du, dp;
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
      const auto& row = study.rows[i];
      du << "n" << row.n << "=" << row.velocity_error << ' ';
      dp << "n" << row.n << "=" << row.pressure_error << ' ';
      if (i > 0) {
        du << "pair_order=" << study.velocity_orders[i - 1] << ' ';
        dp << "pair_order=" << study.pressure_orders[i - 1] << ' ';
      }
    }
    std::string su = du.str(), sp = dp.str();
    su.pop_back();
    sp.pop_back();
    checks.push_back(at_least("velocity_order", study.velocity_order, 2.5, su));
    checks.push_back(at_least("pressure_order", study.pressure_order, 1.5, sp));
  }
  return checks;
}

void write_check_line(std::ostream& out, const CheckResult& check) {
  out << "check=" << check.name << " status=" << (check.passed ? "pass" : "fail")
      << " value=" << check.value << " bound=" << check.bound;
  if (!check.detail.empty()) out << ' ' << check.detail;
  out << '\n';
}

}  // namespace sns
