#pragma once

#include <Eigen/Core>
#include <utility>

#include "sns/field.hpp"
#include "sns/mesh.hpp"
#include "sns/noise.hpp"
#include "sns/quadrature.hpp"
#include "sns/sparse.hpp"

namespace sns {

/// Kinematic viscosity and noise amplitude.
struct ProblemParams {
  double nu = 0.02;
  double sigma = 0.0;

  /// Throws std::invalid_argument unless nu > 0 and sigma >= 0.
  void validate() const;
};

/// a(u, v) = nu * int grad u : grad v, on velocity dofs.
SparseOperator assemble_viscous(const TriMesh& mesh, const DofMap& dofs, double nu);

/// b(u, q) = -int q div u; rows are pressure dofs, columns velocity dofs.
SparseOperator assemble_divergence(const TriMesh& mesh, const DofMap& dofs);

/// g_i = int psi_i for the P1 pressure basis; g . p is the pressure integral.
Eigen::VectorXd assemble_pressure_gauge(const TriMesh& mesh, const DofMap& dofs);

struct ConvectionOptions {
  /// Flip the sign of the w_2 d/dy part of the transport derivative. Only used
  /// to check that the verification battery detects a broken assembly.
  bool inject_sign_error = false;
};

/// Linearizations of c(u, w, v) = int (u . grad) w . v about `w`:
///   v^T N1 u = c(w, u, v),   v^T N2 u = c(u, w, v).
std::pair<SparseOperator, SparseOperator> assemble_convection_linearized(
    const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& w,
    ConvectionOptions options = {});

/// Newton Jacobian of u -> c(u, u, .) at w, i.e. N1(w) + N2(w), in one pass.
SparseOperator assemble_convection_jacobian(const TriMesh& mesh, const DofMap& dofs,
                                            const Eigen::VectorXd& w);

/// Vector r with r . v = c(w, u, v).
Eigen::VectorXd convection_action(const TriMesh& mesh, const DofMap& dofs,
                                  const Eigen::VectorXd& w, const Eigen::VectorXd& u);

/// L . v = int f . v. Closed-form data is integrated with the degree-10 rule
/// unless another rule is given.
Eigen::VectorXd assemble_load(const TriMesh& mesh, const DofMap& dofs, const VectorFunction& f,
                              const QuadratureRule& rule = high_order_rule());

/// L . v = int sigma dW/dx . v for one noise realization. The noise grid must
/// be nested in the mesh (every triangle inside a single noise cell);
/// otherwise std::invalid_argument is thrown.
Eigen::VectorXd assemble_noise_load(const TriMesh& mesh, const DofMap& dofs,
                                    const NoiseField& noise);

}  // namespace sns
