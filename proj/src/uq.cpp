#include "sns/uq.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "sns/assembly.hpp"
#include "sns/manufactured.hpp"

namespace sns {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier-compensated running sum of a coefficient vector.
class CompensatedSum {
 public:
  explicit CompensatedSum(Eigen::Index n)
      : sum_(Eigen::VectorXd::Zero(n)), carry_(Eigen::VectorXd::Zero(n)) {}

  void add(const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double t = sum_[i] + x[i];
      if (std::abs(sum_[i]) >= std::abs(x[i])) {
        carry_[i] += (sum_[i] - t) + x[i];
      } else {
        carry_[i] += (x[i] - t) + sum_[i];
      }
      sum_[i] = t;
    }
  }

  Eigen::VectorXd total() const { return sum_ + carry_; }

 private:
  Eigen::VectorXd sum_;
  Eigen::VectorXd carry_;
};

class FieldMean {
 public:
  explicit FieldMean(const DofMap& dofs)
      : velocity_(dofs.num_velocity_dofs()), pressure_(dofs.num_pressure_dofs()) {}

  void add(const FEField& f) {
    velocity_.add(f.velocity());
    pressure_.add(f.pressure());
    ++count_;
  }

  int count() const { return count_; }

  FEField mean(const DofMap& dofs) const {
    if (count_ == 0) return FEField(dofs);
    return FEField(dofs, velocity_.total() / count_, pressure_.total() / count_);
  }

 private:
  CompensatedSum velocity_;
  CompensatedSum pressure_;
  int count_ = 0;
};

struct SampleOutcome {
  double kappa = 0.0;
  std::optional<FEField> mono;
  /// xi + eta and eta
  std::optional<FEField> split;
  std::optional<FEField> split_correction;
  std::optional<FEField> modified;
  std::optional<FEField> modified_correction;
  std::vector<SolveReport> reports;
  double split_gap = kNaN;
  bool attempted[3] = {false, false, false};
};

SampleOutcome run_sample(const McConfig& cfg, const Experiment& ex, long k) {
  SampleOutcome out;
  const NoiseField noise =
      sample_noise(NoiseGrid(cfg.noise_n), cfg.noise_amplitude(), cfg.base_seed,
                   static_cast<std::uint64_t>(k));
  const Eigen::VectorXd load = assemble_noise_load(ex.mesh(), ex.dofs(), noise);
  out.kappa = noise_l2_norm(noise) / ex.force_norm();
  const FEField& xi = ex.deterministic().field;
  const FlowSolver& solver = ex.solver();

  if (cfg.has(Method::monolithic)) {
    out.attempted[0] = true;
    const FEField init = cfg.monolithic_init == MonolithicInit::deterministic ? xi : FEField(ex.dofs());
    auto res = solver.solve_monolithic(ex.force_load(), load, cfg.newton, init);
    res.report.sample_id = k;
    if (res.report.converged) out.mono = std::move(res.field);
    out.reports.push_back(std::move(res.report));
  }
  if (cfg.has(Method::split)) {
    out.attempted[1] = true;
    auto res = solver.solve_stochastic_full(xi, load, cfg.newton);
    res.report.sample_id = k;
    if (res.report.converged) {
      out.split = xi + res.field;
      out.split_correction = std::move(res.field);
    }
    out.reports.push_back(std::move(res.report));
  }
  if (cfg.has(Method::modified)) {
    out.attempted[2] = true;
    auto res = solver.solve_stochastic_modified(xi, load);
    res.report.sample_id = k;
    if (res.report.converged) {
      out.modified = xi + res.field;
      out.modified_correction = std::move(res.field);
    }
    out.reports.push_back(std::move(res.report));
  }
  if (out.mono && out.split) {
    const double norm = velocity_l2_norm(*out.mono);
    const double gap = l2_error(*out.mono, *out.split);
    out.split_gap = norm > 0.0 ? gap / norm : gap;
  }
  return out;
}

int method_slot(Method m) { return static_cast<int>(m); }

// Running state of one Monte Carlo sequence, reduced strictly in sample order.
class Reduction {
 public:
  Reduction(const McConfig& cfg, std::shared_ptr<const Experiment> ex)
      : cfg_(cfg), ex_(std::move(ex)) {
    const DofMap& dofs = ex_->dofs();
    for (int m = 0; m < 3; ++m) {
      own_.emplace_back(dofs);
      correction_.emplace_back(dofs);
      paired_method_.emplace_back(dofs);
      paired_mono_.emplace_back(dofs);
    }
  }

  void add(SampleOutcome&& s) {
    ++processed_;
    kappa_.push_back(s.kappa);
    kappa_sum_.add(Eigen::VectorXd::Constant(1, s.kappa));
    if (std::isfinite(s.split_gap)) max_gap_ = std::max(max_gap_, s.split_gap);
    const std::optional<FEField>* fields[3] = {&s.mono, &s.split, &s.modified};
    const std::optional<FEField>* corrections[3] = {nullptr, &s.split_correction,
                                                    &s.modified_correction};
    for (int m = 0; m < 3; ++m) {
      if (!s.attempted[m]) continue;
      if (!fields[m]->has_value()) {
        ++failed_[m];
        continue;
      }
      own_[m].add(**fields[m]);
      if (corrections[m]) correction_[m].add(**corrections[m]);
      if (m != 0 && s.mono) {
        paired_method_[m].add(**fields[m]);
        paired_mono_[m].add(*s.mono);
      }
    }
    for (auto& r : s.reports) reports_.push_back(std::move(r));
  }

  int processed() const { return processed_; }

  McStats snapshot() const {
    const DofMap& dofs = ex_->dofs();
    McStats stats;
    stats.experiment = ex_;
    stats.samples = processed_;
    stats.sigma = cfg_.sigma;
    stats.noise_amplitude = cfg_.noise_amplitude();
    stats.kappa = kappa_;
    stats.kappa_mean = processed_ ? kappa_sum_.total()[0] / processed_ : 0.0;
    stats.max_split_gap = max_gap_;
    stats.reports = reports_;
    for (Method method : {Method::monolithic, Method::split, Method::modified}) {
      if (!cfg_.has(method)) continue;
      const int m = method_slot(method);
      MethodStats ms{method, own_[m].mean(dofs), std::nullopt, own_[m].count(), failed_[m], kNaN,
                     kNaN};
      if (method != Method::monolithic) ms.mean_correction = correction_[m].mean(dofs);
      if (method == Method::monolithic) {
        ms.eps = 0.0;
        ms.eps_rel = 0.0;
      } else if (cfg_.has(Method::monolithic) && paired_mono_[m].count() > 0) {
        const ErrorPair e = error_statistics(paired_method_[m].mean(dofs), paired_mono_[m].mean(dofs));
        ms.eps = e.abs;
        ms.eps_rel = e.rel;
      }
      stats.methods.push_back(std::move(ms));
    }
    return stats;
  }

 private:
  const McConfig& cfg_;
  std::shared_ptr<const Experiment> ex_;
  std::vector<FieldMean> own_;
  std::vector<FieldMean> correction_;
  std::vector<FieldMean> paired_method_;
  std::vector<FieldMean> paired_mono_;
  int failed_[3] = {0, 0, 0};
  int processed_ = 0;
  std::vector<double> kappa_;
  CompensatedSum kappa_sum_{1};
  double max_gap_ = 0.0;
  std::vector<SolveReport> reports_;
};

// Evaluates samples first..last (inclusive) on `jobs` threads.
std::vector<SampleOutcome> run_batch(const McConfig& cfg, const Experiment& ex, long first,
                                     long last) {
  const long count = last - first + 1;
  std::vector<std::optional<SampleOutcome>> slots(count);
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (long i = next++; i < count; i = next++) {
      try {
        slots[i] = run_sample(cfg, ex, first + i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = static_cast<int>(std::min<long>(cfg.jobs, count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<SampleOutcome> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::monolithic: return "monolithic";
    case Method::split: return "split";
    case Method::modified: return "modified";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "monolithic") return Method::monolithic;
  if (name == "split") return Method::split;
  if (name == "modified") return Method::modified;
  throw std::invalid_argument("unknown method '" + name + "'");
}

const char* to_string(NoiseScale scale) {
  return scale == NoiseScale::white ? "white" : "pointwise";
}

NoiseScale parse_noise_scale(const std::string& name) {
  if (name == "white") return NoiseScale::white;
  if (name == "pointwise") return NoiseScale::pointwise;
  throw std::invalid_argument("unknown noise scale '" + name + "'");
}

void McConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("samples: must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma: must be >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu: must be > 0");
  if (mesh_n < 1) throw std::invalid_argument("mesh-n: must be >= 1");
  if (noise_n < 1) throw std::invalid_argument("noise-n: must be >= 1");
  if (mesh_n % noise_n != 0) {
    throw std::invalid_argument("noise-n: must divide mesh-n (nested noise grid)");
  }
  if (methods.empty()) throw std::invalid_argument("methods: at least one method is required");
  if (jobs < 1) throw std::invalid_argument("jobs: must be >= 1");
  newton.validate();
}

double McConfig::noise_amplitude() const {
  if (noise_scale == NoiseScale::white) return sigma;
  return sigma / noise_n;  // sigma * sqrt(V_k)
}

bool McConfig::has(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

Experiment::Experiment(int mesh_n, double nu, const NewtonConfig& newton)
    : nu_(nu),
      mesh_(std::make_unique<TriMesh>(build_structured_mesh(mesh_n))),
      dofs_(std::make_unique<DofMap>(*mesh_)),
      solver_(std::make_unique<FlowSolver>(*mesh_, *dofs_, ProblemParams{nu, 0.0})) {
  const ForcingSpec forcing{nu};
  force_load_ = assemble_load(*mesh_, *dofs_, forcing);
  force_norm_ = l2_norm(*dofs_, forcing);
  xi_ = std::make_unique<Solved<FEField>>(solver_->solve_deterministic(force_load_, newton));
  if (!xi_->report.converged) throw DeterministicSolveError(xi_->report);
}

DeterministicSolveError::DeterministicSolveError(SolveReport report)
    : std::runtime_error("deterministic Newton solve did not converge (" +
                         std::string(to_string(report.status)) + " after " +
                         std::to_string(report.iterations) + " iterations)"),
      report_(std::move(report)) {}

const MethodStats* McStats::find(Method m) const {
  for (const auto& ms : methods) {
    if (ms.method == m) return &ms;
  }
  return nullptr;
}

std::vector<McStats> run_experiment_series(const McConfig& cfg,
                                           std::shared_ptr<const Experiment> experiment,
                                           std::vector<int> sizes) {
  cfg.validate();
  if (!experiment) throw std::invalid_argument("run_experiment: null experiment");
  if (sizes.empty()) sizes.push_back(cfg.samples);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.front() < 1) throw std::invalid_argument("samples: must be >= 1");

  Reduction reduction(cfg, experiment);
  std::vector<McStats> out;
  std::size_t next_size = 0;
  const long total = sizes.back();
  const long batch = 8L * cfg.jobs;
  for (long first = 1; first <= total; first += batch) {
    const long last = std::min(total, first + batch - 1);
    for (auto& s : run_batch(cfg, *experiment, first, last)) {
      reduction.add(std::move(s));
      if (reduction.processed() == sizes[next_size]) {
        out.push_back(reduction.snapshot());
        ++next_size;
      }
    }
  }
  return out;
}

McStats run_experiment(const McConfig& cfg, std::shared_ptr<const Experiment> experiment) {
  return run_experiment_series(cfg, std::move(experiment), {cfg.samples}).back();
}

McStats run_experiment(const McConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, std::make_shared<const Experiment>(cfg.mesh_n, cfg.nu, cfg.newton));
}

ErrorPair error_statistics(const FEField& mean, const FEField& reference_mean) {
  ErrorPair e;
  e.abs = l2_error(mean, reference_mean);
  const double norm = velocity_l2_norm(reference_mean);
  e.rel = norm > 0.0 ? e.abs / norm : kNaN;
  return e;
}

double mean_closeness_check(const FEField& xi, const McStats& stats) {
  const MethodStats* mono = stats.find(Method::monolithic);
  if (!mono) throw std::invalid_argument("mean_closeness_check: no monolithic mean in stats");
  return l2_error(xi, mono->mean);
}

Diagnostics diagnostics_from_norm(double force_norm, double nu) {
  Diagnostics d;
  d.force_norm = force_norm;
  d.indicator = force_norm / (nu * nu);
  d.split_ok = d.indicator <= Diagnostics::split_threshold;
  d.modified_ok = d.indicator <= Diagnostics::modified_threshold;
  return d;
}

Diagnostics diagnostics(const McConfig& cfg) {
  if (!(cfg.nu > 0.0)) throw std::invalid_argument("nu: must be > 0");
  const TriMesh mesh = build_structured_mesh(cfg.mesh_n);
  const DofMap dofs(mesh);
  Diagnostics d = diagnostics_from_norm(l2_norm(dofs, ForcingSpec{cfg.nu}), cfg.nu);
  // E|zeta_k|^2 = 2 per cell.
  if (d.force_norm > 0.0) {
    d.kappa_mean = cfg.noise_amplitude() * std::sqrt(2.0 * cfg.noise_n * cfg.noise_n) / d.force_norm;
  }
  return d;
}

void write_stats_header(std::ostream& out) {
  out << "method,sigma,noise_amplitude,M,eps,eps_rel,kappa_mean,converged,failures\n";
}

void write_stats_rows(std::ostream& out, const McStats& stats) {
  const auto old = out.precision(17);
  for (const auto& ms : stats.methods) {
    out << to_string(ms.method) << ',' << stats.sigma << ',' << stats.noise_amplitude << ','
        << stats.samples << ',' << ms.eps << ',' << ms.eps_rel << ',' << stats.kappa_mean << ','
        << ms.converged << ',' << ms.failed << '\n';
  }
  out.precision(old);
}

void write_field_csv(std::ostream& out, const FEField& field) {
  const auto old = out.precision(17);
  const DofMap& dofs = field.dofs();
  out << "x,y,u1,u2,|u|\n";
  for (int k = 0; k < dofs.num_nodes(); ++k) {
    const Point2 p = dofs.node_coordinate(k);
    const double u1 = field.velocity()[k];
    const double u2 = field.velocity()[dofs.num_nodes() + k];
    out << p.x << ',' << p.y << ',' << u1 << ',' << u2 << ',' << std::hypot(u1, u2) << '\n';
  }
  out.precision(old);
}

}  // namespace sns
