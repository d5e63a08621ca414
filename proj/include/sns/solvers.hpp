#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sns/assembly.hpp"
#include "sns/field.hpp"
#include "sns/mesh.hpp"
#include "sns/sparse.hpp"

namespace sns {

/// Raised when the factorization of a saddle system fails or the computed
/// solution does not satisfy the system to working accuracy.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewtonConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 25;
  double damping = 1.0;

  void validate() const;
};

enum class SolveStatus { converged, max_iterations, singular, diverged };

const char* to_string(SolveStatus status);

struct SolveReport {
  std::string method;
  long sample_id = -1;
  SolveStatus status = SolveStatus::max_iterations;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  /// Residual target the run was held to.
  double tolerance = 0.0;
  std::vector<double> residual_history;
  double seconds = 0.0;
};

/// CSV row: method,sample_id,converged,iterations,final_residual,status,residual_history
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const SolveReport& report);

/// Solves the saddle system
///
///   [ A   B^T  0 ] [u]   [r_u]
///   [ B   0    g ] [p] = [r_p]
///   [ 0   g^T  0 ] [l]   [r_g]
///
/// by sparse LU. Velocity unknowns flagged in `dirichlet` are eliminated
/// symmetrically and returned as zero. `rhs` has the same layout as the
/// unknown. Throws std::invalid_argument on dimension mismatch and
/// SingularSystemError when the system cannot be solved.
Eigen::VectorXd linear_saddle_solve(const SparseOperator& a_block, const SparseOperator& b_block,
                                    const Eigen::VectorXd& rhs, const Eigen::VectorXd& gauge,
                                    const std::vector<bool>& dirichlet);

template <typename T>
struct Solved {
  T field;
  SolveReport report;
};

/// Discrete steady (stochastic) Navier-Stokes problem on one mesh. Holds the
/// parameter-dependent constant blocks (viscous, divergence, gauge); every
/// solve allocates its own workspace, so a const FlowSolver can be shared
/// between threads. `mesh` and `dofs` must outlive it.
class FlowSolver {
 public:
  FlowSolver(const TriMesh& mesh, const DofMap& dofs, ProblemParams params);

  const TriMesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const ProblemParams& params() const { return params_; }
  const SparseOperator& viscous() const { return viscous_; }
  const SparseOperator& divergence() const { return divergence_; }
  const Eigen::VectorXd& gauge() const { return gauge_; }

  /// Linear Stokes problem (convection dropped).
  FEField solve_stokes(const Eigen::VectorXd& load) const;

  /// xi: a(xi,v) + c(xi,xi,v) + b(v,p1) = (F,v), b(xi,q) = 0. Newton from the
  /// Stokes solution.
  Solved<FEField> solve_deterministic(const Eigen::VectorXd& force_load,
                                      const NewtonConfig& cfg) const;

  /// eta: a(eta,v) + c(eta,eta,v) + c(eta,xi,v) + c(xi,eta,v) + b(v,p2)
  ///      = (sigma dW/dx, v), b(eta,q) = 0. Newton from eta = 0.
  Solved<FEField> solve_stochastic_full(const FEField& xi, const Eigen::VectorXd& noise_load,
                                        const NewtonConfig& cfg) const;

  /// Same as solve_stochastic_full with c(eta,eta,v) dropped: one linear solve.
  Solved<FEField> solve_stochastic_modified(const FEField& xi,
                                            const Eigen::VectorXd& noise_load) const;

  /// Full stochastic problem per sample, Newton from `initial_guess`.
  Solved<FEField> solve_monolithic(const Eigen::VectorXd& force_load,
                                   const Eigen::VectorXd& noise_load, const NewtonConfig& cfg,
                                   const FEField& initial_guess) const;

  /// Nonlinear residual of the full problem at system vector x for a given
  /// velocity load; Dirichlet rows are zero.
  Eigen::VectorXd residual(const Eigen::VectorXd& x, const Eigen::VectorXd& velocity_load) const;
  /// Newton matrix of `residual` at x (no Dirichlet elimination).
  SparseMatrix jacobian(const Eigen::VectorXd& x) const;

 private:
  struct NewtonProblem;

  Solved<FEField> newton(const NewtonProblem& problem, Eigen::VectorXd x,
                         const NewtonConfig& cfg) const;
  Eigen::VectorXd solve_with_velocity_block(const SparseOperator& velocity_block,
                                            const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd linear_part(const Eigen::VectorXd& x) const;
  double free_norm(const Eigen::VectorXd& r) const;

  const TriMesh& mesh_;
  const DofMap& dofs_;
  ProblemParams params_;
  SparseOperator viscous_;
  SparseOperator divergence_;
  Eigen::VectorXd gauge_;
};

}  // namespace sns
