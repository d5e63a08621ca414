#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sns/field.hpp"
#include "sns/mesh.hpp"
#include "sns/noise.hpp"
#include "sns/solvers.hpp"

namespace sns {

enum class Method { monolithic, split, modified };

const char* to_string(Method method);
Method parse_method(const std::string& name);

/// How `McConfig::sigma` maps onto the amplitude of the white-noise sum
/// sum_k sigma / sqrt(V_k) zeta_k chi_k.
enum class NoiseScale {
  /// sigma is the amplitude in that sum directly.
  white,
  /// sigma is the per-cell standard deviation of the forcing, i.e. the
  /// amplitude is sigma * sqrt(V_k). With this scale the perturbation ratio
  /// kappa is about sigma * sqrt(2) / ||F|| independently of the noise grid.
  pointwise,
};

const char* to_string(NoiseScale scale);
NoiseScale parse_noise_scale(const std::string& name);

enum class MonolithicInit { deterministic, zero };

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct McConfig {
  int samples = 100;
  std::uint64_t base_seed = kDefaultSeed;
  double sigma = 1.5;
  NoiseScale noise_scale = NoiseScale::pointwise;
  double nu = 0.02;
  int mesh_n = 12;
  int noise_n = 12;
  std::vector<Method> methods{Method::monolithic, Method::split, Method::modified};
  NewtonConfig newton;
  MonolithicInit monolithic_init = MonolithicInit::deterministic;
  int jobs = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// sigma in the white-noise sum after applying `noise_scale`.
  double noise_amplitude() const;
  bool has(Method m) const;
};

/// The deterministic solve behind an Experiment failed; carries its report.
class DeterministicSolveError : public std::runtime_error {
 public:
  explicit DeterministicSolveError(SolveReport report);
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Mesh, dofs, solver, deterministic load and xi for one (nu, mesh) pair.
/// Immutable after construction and shared read-only by the sample workers.
/// Throws DeterministicSolveError when xi does not converge.
class Experiment {
 public:
  Experiment(int mesh_n, double nu, const NewtonConfig& newton);

  const TriMesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return *dofs_; }
  const FlowSolver& solver() const { return *solver_; }
  const Eigen::VectorXd& force_load() const { return force_load_; }
  const Solved<FEField>& deterministic() const { return *xi_; }
  double force_norm() const { return force_norm_; }
  double nu() const { return nu_; }

 private:
  double nu_;
  std::unique_ptr<TriMesh> mesh_;
  std::unique_ptr<DofMap> dofs_;
  std::unique_ptr<FlowSolver> solver_;
  Eigen::VectorXd force_load_;
  double force_norm_ = 0.0;
  std::unique_ptr<Solved<FEField>> xi_;
};

struct MethodStats {
  Method method = Method::monolithic;
  /// Mean over this method's converged samples.
  FEField mean;
  /// Mean of the stochastic correction (eta or modified eta) for splitting methods.
  std::optional<FEField> mean_correction;
  int converged = 0;
  int failed = 0;
  /// Against the monolithic mean over samples where both converged; NaN when
  /// undefined (no monolithic reference or zero reference norm).
  double eps = 0.0;
  double eps_rel = 0.0;
};

struct McStats {
  /// Keeps the dof map referenced by the mean fields alive.
  std::shared_ptr<const Experiment> experiment;
  int samples = 0;
  double sigma = 0.0;
  double noise_amplitude = 0.0;
  std::vector<MethodStats> methods;
  std::vector<double> kappa;
  double kappa_mean = 0.0;
  /// Largest per-sample relative L2 gap between monolithic u and xi + eta.
  double max_split_gap = 0.0;
  std::vector<SolveReport> reports;

  const MethodStats* find(Method m) const;
};

/// Runs M samples; sample k = 1..M draws its noise from stream k of
/// `base_seed`. Results do not depend on `jobs` or completion order.
McStats run_experiment(const McConfig& cfg);
McStats run_experiment(const McConfig& cfg, std::shared_ptr<const Experiment> experiment);

/// Same sample sequence, statistics snapshotted after each prefix size in
/// `sizes` (ascending; the largest is the number of samples drawn).
std::vector<McStats> run_experiment_series(const McConfig& cfg,
                                           std::shared_ptr<const Experiment> experiment,
                                           std::vector<int> sizes);

struct ErrorPair {
  double abs = 0.0;
  /// NaN when the reference mean has zero norm.
  double rel = 0.0;
};

/// eps = ||mean - reference||_L2, eps_rel = eps / ||reference||_L2 (velocity only).
ErrorPair error_statistics(const FEField& mean, const FEField& reference_mean);

/// ||xi - E_M[u_mono]||_L2.
double mean_closeness_check(const FEField& xi, const McStats& stats);

struct Diagnostics {
  double force_norm = 0.0;
  /// ||F||_L2 / nu^2; the L2 norm stands in for the H^-1 norm.
  double indicator = 0.0;
  static constexpr double split_threshold = 7.0 / 8.0;
  static constexpr double modified_threshold = 5.0 / 8.0;
  bool split_ok = true;
  bool modified_ok = true;
  double kappa_mean = 0.0;
};

Diagnostics diagnostics(const McConfig& cfg);
Diagnostics diagnostics_from_norm(double force_norm, double nu);

/// stats.csv: method,sigma,noise_amplitude,M,eps,eps_rel,kappa_mean,converged,failures
void write_stats_header(std::ostream& out);
void write_stats_rows(std::ostream& out, const McStats& stats);
/// field CSV: x,y,u1,u2,|u| at every P2 node.
void write_field_csv(std::ostream& out, const FEField& field);

}  // namespace sns
