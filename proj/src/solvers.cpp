#include "sns/solvers.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace sns {

void NewtonConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("NewtonConfig: tolerances must be > 0");
  }
  if (max_iter < 1) throw std::invalid_argument("NewtonConfig: max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw std::invalid_argument("NewtonConfig: damping must lie in (0, 1]");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::singular: return "singular";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

void write_report_csv_header(std::ostream& out) {
  out << "method,sample_id,converged,iterations,final_residual,status,residual_history\n";
}

void write_report_csv_row(std::ostream& out, const SolveReport& report) {
  const auto old = out.precision(17);
  out << report.method << ',' << report.sample_id << ',' << (report.converged ? 1 : 0) << ','
      << report.iterations << ',' << report.final_residual << ',' << to_string(report.status)
      << ',';
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    if (i) out << ';';
    out << report.residual_history[i];
  }
  out << '\n';
  out.precision(old);
}

Eigen::VectorXd linear_saddle_solve(const SparseOperator& a_block, const SparseOperator& b_block,
                                    const Eigen::VectorXd& rhs, const Eigen::VectorXd& gauge,
                                    const std::vector<bool>& dirichlet) {
  const int nv = a_block.rows();
  const int np = b_block.rows();
  if (a_block.cols() != nv || b_block.cols() != nv || gauge.size() != np ||
      static_cast<int>(dirichlet.size()) != nv || rhs.size() != nv + np + 1) {
    throw std::invalid_argument("linear_saddle_solve: block dimensions do not match");
  }
  const int n = nv + np + 1;

  std::vector<Triplet> entries;
  entries.reserve(a_block.nonzeros() + 2 * b_block.nonzeros() + 2 * np + nv);
  const SparseMatrix& a = a_block.matrix();
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (dirichlet[it.row()] || dirichlet[it.col()]) continue;
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int i = 0; i < nv; ++i) {
    if (dirichlet[i]) entries.emplace_back(i, i, 1.0);
  }
  const SparseMatrix& b = b_block.matrix();
  for (int k = 0; k < b.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(b, k); it; ++it) {
      if (dirichlet[it.col()]) continue;
      const int row = nv + static_cast<int>(it.row());
      const int col = static_cast<int>(it.col());
      entries.emplace_back(row, col, it.value());
      entries.emplace_back(col, row, it.value());
    }
  }
  for (int i = 0; i < np; ++i) {
    entries.emplace_back(nv + i, n - 1, gauge[i]);
    entries.emplace_back(n - 1, nv + i, gauge[i]);
  }
  SparseMatrix system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();

  Eigen::VectorXd b_vec = rhs;
  for (int i = 0; i < nv; ++i) {
    if (dirichlet[i]) b_vec[i] = 0.0;
  }

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(system);
  lu.factorize(system);
  if (lu.info() != Eigen::Success) {
    throw SingularSystemError("linear_saddle_solve: factorization failed (" + lu.lastErrorMessage() +
                              ")");
  }
  Eigen::VectorXd x = lu.solve(b_vec);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw SingularSystemError("linear_saddle_solve: back substitution failed");
  }

  // Accept only solutions that satisfy the system to working accuracy.
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < system.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(system, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  const double norm_k = row_sums.maxCoeff();
  const double defect = (system * x - b_vec).lpNorm<Eigen::Infinity>();
  const double scale = norm_k * x.lpNorm<Eigen::Infinity>() + b_vec.lpNorm<Eigen::Infinity>();
  if (defect > 1e-10 * scale) {
    throw SingularSystemError("linear_saddle_solve: system is numerically singular");
  }
  return x;
}

struct FlowSolver::NewtonProblem {
  Eigen::VectorXd velocity_load;
  /// Fixed background velocity (xi) for the correction equation, or null.
  const Eigen::VectorXd* background = nullptr;
};

FlowSolver::FlowSolver(const TriMesh& mesh, const DofMap& dofs, ProblemParams params)
    : mesh_(mesh), dofs_(dofs), params_(params) {
  params_.validate();
  viscous_ = assemble_viscous(mesh_, dofs_, params_.nu);
  divergence_ = assemble_divergence(mesh_, dofs_);
  gauge_ = assemble_pressure_gauge(mesh_, dofs_);
}

Eigen::VectorXd FlowSolver::solve_with_velocity_block(const SparseOperator& velocity_block,
                                                      const Eigen::VectorXd& rhs) const {
  return linear_saddle_solve(velocity_block, divergence_, rhs, gauge_, dofs_.dirichlet_mask());
}

Eigen::VectorXd FlowSolver::linear_part(const Eigen::VectorXd& x) const {
  const int nv = dofs_.num_velocity_dofs();
  const int np = dofs_.num_pressure_dofs();
  const auto u = x.head(nv);
  const auto p = x.segment(nv, np);
  const double lambda = x[nv + np];
  Eigen::VectorXd r(x.size());
  r.head(nv) = viscous_.matrix() * u + divergence_.matrix().transpose() * p;
  r.segment(nv, np) = divergence_.matrix() * u + lambda * gauge_;
  r[nv + np] = gauge_.dot(p);
  return r;
}

double FlowSolver::free_norm(const Eigen::VectorXd& r) const {
  const auto& mask = dofs_.dirichlet_mask();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (i < static_cast<Eigen::Index>(mask.size()) && mask[i]) continue;
    sum += r[i] * r[i];
  }
  return std::sqrt(sum);
}

Eigen::VectorXd FlowSolver::residual(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& velocity_load) const {
  const int nv = dofs_.num_velocity_dofs();
  const Eigen::VectorXd u = x.head(nv);
  Eigen::VectorXd r = linear_part(x);
  r.head(nv) += convection_action(mesh_, dofs_, u, u) - velocity_load;
  const auto& mask = dofs_.dirichlet_mask();
  for (int i = 0; i < nv; ++i) {
    if (mask[i]) r[i] = 0.0;
  }
  return r;
}

SparseMatrix FlowSolver::jacobian(const Eigen::VectorXd& x) const {
  const int nv = dofs_.num_velocity_dofs();
  const int np = dofs_.num_pressure_dofs();
  const int n = nv + np + 1;
  const SparseOperator block = viscous_ + assemble_convection_jacobian(mesh_, dofs_, x.head(nv));
  std::vector<Triplet> entries;
  const auto append = [&entries](const SparseMatrix& m, int row0, int col0, bool transpose) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (transpose) {
          entries.emplace_back(row0 + c, col0 + r, it.value());
        } else {
          entries.emplace_back(row0 + r, col0 + c, it.value());
        }
      }
    }
  };
  append(block.matrix(), 0, 0, false);
  append(divergence_.matrix(), nv, 0, false);
  append(divergence_.matrix(), 0, nv, true);
  for (int i = 0; i < np; ++i) {
    entries.emplace_back(nv + i, n - 1, gauge_[i]);
    entries.emplace_back(n - 1, nv + i, gauge_[i]);
  }
  SparseMatrix j(n, n);
  j.setFromTriplets(entries.begin(), entries.end());
  return j;
}

FEField FlowSolver::solve_stokes(const Eigen::VectorXd& load) const {
  if (load.size() != dofs_.num_velocity_dofs()) {
    throw std::invalid_argument("solve_stokes: load length mismatch");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs_.num_system_dofs());
  rhs.head(load.size()) = load;
  return FEField::from_system_vector(dofs_, solve_with_velocity_block(viscous_, rhs));
}

Solved<FEField> FlowSolver::newton(const NewtonProblem& problem, Eigen::VectorXd x,
                                   const NewtonConfig& cfg) const {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int nv = dofs_.num_velocity_dofs();
  const auto& mask = dofs_.dirichlet_mask();
  for (int i = 0; i < nv; ++i) {
    if (mask[i]) x[i] = 0.0;
  }

  const auto evaluate = [&](const Eigen::VectorXd& state) {
    const Eigen::VectorXd u = state.head(nv);
    Eigen::VectorXd r = linear_part(state);
    if (problem.background) {
      // c(xi + eta, eta, .) + c(eta, xi, .)
      const Eigen::VectorXd w = *problem.background + u;
      r.head(nv) += convection_action(mesh_, dofs_, w, u) +
                    convection_action(mesh_, dofs_, u, *problem.background);
    } else {
      r.head(nv) += convection_action(mesh_, dofs_, u, u);
    }
    r.head(nv) -= problem.velocity_load;
    for (int i = 0; i < nv; ++i) {
      if (mask[i]) r[i] = 0.0;
    }
    return r;
  };

  SolveReport report;
  Eigen::VectorXd r = evaluate(x);
  double norm = free_norm(r);
  report.residual_history.push_back(norm);
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * norm);
  report.tolerance = tol;
  report.status = SolveStatus::max_iterations;

  for (int it = 0;; ++it) {
    if (!std::isfinite(norm)) {
      report.status = SolveStatus::diverged;
      break;
    }
    if (norm <= tol) {
      report.status = SolveStatus::converged;
      break;
    }
    if (it == cfg.max_iter) break;

    Eigen::VectorXd w = x.head(nv);
    if (problem.background) w += *problem.background;
    const SparseOperator block = viscous_ + assemble_convection_jacobian(mesh_, dofs_, w);
    Eigen::VectorXd step;
    try {
      step = solve_with_velocity_block(block, -r);
    } catch (const SingularSystemError&) {
      report.status = SolveStatus::singular;
      break;
    }
    ++report.iterations;
    x += cfg.damping * step;
    r = evaluate(x);
    norm = free_norm(r);
    report.residual_history.push_back(norm);
  }

  report.converged = report.status == SolveStatus::converged;
  report.final_residual = report.residual_history.back();
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {FEField::from_system_vector(dofs_, x), std::move(report)};
}

Solved<FEField> FlowSolver::solve_deterministic(const Eigen::VectorXd& force_load,
                                                const NewtonConfig& cfg) const {
  const auto start = std::chrono::steady_clock::now();
  const FEField stokes = solve_stokes(force_load);
  auto result = newton({force_load, nullptr}, stokes.to_system_vector(), cfg);
  result.report.method = "deterministic";
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Solved<FEField> FlowSolver::solve_stochastic_full(const FEField& xi,
                                                  const Eigen::VectorXd& noise_load,
                                                  const NewtonConfig& cfg) const {
  if (noise_load.size() != dofs_.num_velocity_dofs()) {
    throw std::invalid_argument("solve_stochastic_full: noise load length mismatch");
  }
  const Eigen::VectorXd background = xi.velocity();
  auto result = newton({noise_load, &background},
                       Eigen::VectorXd::Zero(dofs_.num_system_dofs()), cfg);
  result.report.method = "split";
  return result;
}

Solved<FEField> FlowSolver::solve_stochastic_modified(const FEField& xi,
                                                      const Eigen::VectorXd& noise_load) const {
  if (noise_load.size() != dofs_.num_velocity_dofs()) {
    throw std::invalid_argument("solve_stochastic_modified: noise load length mismatch");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.method = "modified";
  report.iterations = 1;
  const SparseOperator block =
      viscous_ + assemble_convection_jacobian(mesh_, dofs_, xi.velocity());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs_.num_system_dofs());
  rhs.head(noise_load.size()) = noise_load;
  FEField eta(dofs_);
  try {
    const Eigen::VectorXd x = solve_with_velocity_block(block, rhs);
    eta = FEField::from_system_vector(dofs_, x);
    // Residual of the linear correction equation, for the report.
    Eigen::VectorXd r = linear_part(x);
    r.head(noise_load.size()) += block.apply(x.head(noise_load.size())) -
                                 viscous_.apply(x.head(noise_load.size())) - noise_load;
    const auto& mask = dofs_.dirichlet_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) r[static_cast<Eigen::Index>(i)] = 0.0;
    }
    report.final_residual = free_norm(r);
    report.residual_history.push_back(report.final_residual);
    report.status = SolveStatus::converged;
    report.converged = true;
  } catch (const SingularSystemError&) {
    report.status = SolveStatus::singular;
    report.final_residual = std::numeric_limits<double>::quiet_NaN();
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(eta), std::move(report)};
}

Solved<FEField> FlowSolver::solve_monolithic(const Eigen::VectorXd& force_load,
                                             const Eigen::VectorXd& noise_load,
                                             const NewtonConfig& cfg,
                                             const FEField& initial_guess) const {
  if (force_load.size() != dofs_.num_velocity_dofs() ||
      noise_load.size() != dofs_.num_velocity_dofs()) {
    throw std::invalid_argument("solve_monolithic: load length mismatch");
  }
  auto result = newton({force_load + noise_load, nullptr}, initial_guess.to_system_vector(), cfg);
  result.report.method = "monolithic";
  return result;
}

}  // namespace sns
