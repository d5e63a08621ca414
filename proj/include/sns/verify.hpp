#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sns/assembly.hpp"
#include "sns/mesh.hpp"
#include "sns/quadrature.hpp"
#include "sns/solvers.hpp"

namespace sns {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Measured quantity and the bound it was held to.
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Orthonormal basis (columns, full velocity numbering) of the P2 fields that
/// are pointwise divergence free, and vanish on the boundary when
/// `boundary_zero` is set. div w is linear on each triangle, so it is enough
/// to pin it to zero at the three vertices. On the 2x2 mesh the boundary-zero
/// space is trivial.
Eigen::MatrixXd divergence_free_basis(const TriMesh& mesh, const DofMap& dofs,
                                      bool boundary_zero = true);

struct TrilinearCheck {
  int n = 0;
  int fields = 0;
  int kernel_dim = 0;
  /// False when the boundary-zero space was empty and w was drawn from the
  /// divergence-free fields with free boundary values instead. u and v always
  /// vanish on the boundary, so the identities hold either way.
  bool w_boundary_zero = true;
  /// max |c(w,v,v)| / (||w|| ||v||^2)
  double max_self = 0.0;
  /// max |c(w,u,v) + c(w,v,u)| / (||w|| ||u|| ||v||)
  double max_skew = 0.0;
  /// max ||N1(w) u - convection_action(w, u)||_inf / ||convection_action(w, u)||_inf
  double max_action_gap = 0.0;
};

/// w is a random element of divergence_free_basis, u and v random
/// boundary-zero fields; norms are L2 norms of the FE velocities.
/// N1 and c(w, u, v) are integrated exactly by the degree-5 rule.
TrilinearCheck check_trilinear_identities(int n, int fields, std::uint64_t seed,
                                          ConvectionOptions options = {});

struct QuadratureCheck {
  int degree = 0;
  /// Worst absolute error over monomials x^a y^b, a + b <= degree, on the
  /// reference triangle.
  double max_error = 0.0;
};

QuadratureCheck check_quadrature(const QuadratureRule& rule);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double velocity_error = 0.0;
  double pressure_error = 0.0;
  int newton_iterations = 0;
};

/// Least-squares slope of log(error) against log(h) over a refinement family.
double observed_order(const std::vector<double>& h, const std::vector<double>& error);

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Orders between consecutive meshes.
  std::vector<double> velocity_orders;
  std::vector<double> pressure_orders;
  /// observed_order over all rows
  double velocity_order = 0.0;
  double pressure_order = 0.0;
};

/// Deterministic solve against the closed-form flow on each mesh size.
ConvergenceStudy convergence_study(const std::vector<int>& sizes, double nu,
                                   const NewtonConfig& newton = {});

struct VerifyOptions {
  bool convergence = false;
  /// Inject a sign error into the convection assembly used by the trilinear checks.
  bool mutate = false;
  std::uint64_t seed = 20240917;
  int jobs = 1;
  int trilinear_fields = 20;
  double nu = 0.02;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);

/// check=<name> status=<pass|fail> value=<v> bound=<b> [detail]
void write_check_line(std::ostream& out, const CheckResult& check);

}  // namespace sns
