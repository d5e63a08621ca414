#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "sns/verify.hpp"

using namespace sns;

namespace {

const CheckResult* find_check(const std::vector<CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("divergence-free kernel dimensions") {
  for (auto [n, dim] : {std::pair{2, 0}, std::pair{4, 8}, std::pair{8, 72}}) {
    CAPTURE(n);
    const TriMesh mesh = build_structured_mesh(n);
    const DofMap dofs(mesh);
    const Eigen::MatrixXd basis = divergence_free_basis(mesh, dofs);
    CHECK(basis.cols() == dim);
    if (dim > 0) {
      const Eigen::MatrixXd gram = basis.transpose() * basis;
      CHECK((gram - Eigen::MatrixXd::Identity(dim, dim)).norm() <= 1e-10);
    }
  }
  const TriMesh mesh = build_structured_mesh(2);
  const DofMap dofs(mesh);
  CHECK(divergence_free_basis(mesh, dofs, false).cols() > 0);
}

TEST_CASE("trilinear identities hold on exactly divergence-free fields") {
  for (int n : {2, 4, 8}) {
    CAPTURE(n);
    const TrilinearCheck t = check_trilinear_identities(n, 5, 11);
    CHECK(t.fields == 5);
    CHECK(t.w_boundary_zero == (n > 2));
    CHECK(t.max_self <= 1e-11);
    CHECK(t.max_skew <= 1e-11);
    CHECK(t.max_action_gap <= 1e-12);
  }
}

TEST_CASE("an injected sign error breaks the identities") {
  ConvectionOptions broken;
  broken.inject_sign_error = true;
  const TrilinearCheck t = check_trilinear_identities(4, 5, 11, broken);
  CHECK(t.max_self > 1e-3);
  CHECK(t.max_skew > 1e-3);
}

TEST_CASE("quadrature checks") {
  CHECK(check_quadrature(default_rule()).degree == 5);
  CHECK(check_quadrature(default_rule()).max_error <= 1e-14);
  CHECK(check_quadrature(high_order_rule()).max_error <= 1e-14);
}

TEST_CASE("observed order") {
  const std::vector<double> h{0.4, 0.2, 0.1};
  CHECK(observed_order(h, {1.6e-2, 2e-3, 2.5e-4}) == doctest::Approx(3.0).epsilon(1e-12));
  // slope of the best-fit line, not of the worst pair
  const double fitted = observed_order(h, {1.0, 0.25, 0.03125});
  CHECK(fitted == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(observed_order({0.1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(observed_order(h, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("convergence study against the closed-form flow") {
  const ConvergenceStudy study = convergence_study({4, 8, 16}, 0.02);
  REQUIRE(study.rows.size() == 3);
  CHECK(study.velocity_orders.size() == 2);
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    CHECK(study.rows[i].velocity_error < study.rows[i - 1].velocity_error);
    CHECK(study.rows[i].pressure_error < study.rows[i - 1].pressure_error);
  }
  CHECK(study.velocity_order >= 2.5);
  CHECK(study.pressure_order >= 1.5);
}

TEST_CASE("verification battery") {
  VerifyOptions options;
  const std::vector<CheckResult> checks = run_verification(options);
  CHECK(checks.size() == 12);
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
  REQUIRE(find_check(checks, "splitting_equivalence"));

  std::ostringstream line;
  write_check_line(line, checks.front());
  CHECK(line.str().rfind("check=quadrature_degree5 status=pass value=", 0) == 0);
  CHECK(line.str().back() == '\n');

  options.mutate = true;
  const std::vector<CheckResult> mutated = run_verification(options);
  for (int n : {4, 8}) {
    const std::string suffix = "_n" + std::to_string(n);
    REQUIRE(find_check(mutated, "trilinear_self" + suffix));
    CHECK_FALSE(find_check(mutated, "trilinear_self" + suffix)->passed);
    CHECK_FALSE(find_check(mutated, "trilinear_skew" + suffix)->passed);
  }
  CHECK(find_check(mutated, "quadrature_degree5")->passed);
}
