// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "sns/manufactured.hpp"
#include "sns/noise.hpp"
#include "sns/uq.hpp"
#include "sns/verify.hpp"

using namespace sns;

namespace {

using Clock = std::chrono::steady_clock;

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s %s time=%.1fs\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

McConfig base_config() {
  McConfig cfg;
  cfg.nu = 0.02;
  cfg.mesh_n = 12;
  cfg.noise_n = 12;
  cfg.jobs = jobs();
  return cfg;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::shared_ptr<const Experiment> shared_experiment() {
  static const auto ex = [] {
    const McConfig cfg = base_config();
    return std::make_shared<const Experiment>(cfg.mesh_n, cfg.nu, cfg.newton);
  }();
  return ex;
}

// eps_mh at M = 200 for each sigma, shared by criteria 2 and 3.
const McStats& modified_run(double sigma) {
  static std::vector<std::pair<double, McStats>> cache;
  for (const auto& [s, stats] : cache) {
    if (s == sigma) return stats;
  }
  McConfig cfg = base_config();
  cfg.samples = 200;
  cfg.sigma = sigma;
  cfg.methods = {Method::monolithic, Method::modified};
  cache.emplace_back(sigma, run_experiment(cfg, shared_experiment()));
  return cache.back().second;
}

Outcome splitting_equivalence() {
  const auto t0 = Clock::now();
  McConfig cfg = base_config();
  cfg.samples = 10;
  cfg.sigma = 1.5;
  cfg.methods = {Method::monolithic, Method::split};
  const McStats stats = run_experiment(cfg);
  const double t = seconds_since(t0);
  const int pairs = std::min(stats.find(Method::monolithic)->converged, stats.find(Method::split)->converged);
  Outcome o;
  o.pass = stats.max_split_gap <= 1e-10 && pairs > 0 && t < 120.0;
  o.detail = "max_rel_gap=" + fmt(stats.max_split_gap) + " converged_pairs=" + std::to_string(pairs) +
             " kappa_mean=" + fmt(stats.kappa_mean);
  return o;
}

Outcome modified_magnitude() {
  const auto t0 = Clock::now();
  const McStats& stats = modified_run(2.4);
  const double t = seconds_since(t0);
  const MethodStats* mod = stats.find(Method::modified);
  Outcome o;
  o.pass = mod->eps >= 2e-4 && mod->eps <= 5e-3 && mod->eps_rel >= 1e-3 / 5.0 && mod->eps_rel <= 1e-3 * 5.0 &&
           t < 600.0;
  o.detail = "sigma=2.4 kappa_mean=" + fmt(stats.kappa_mean) + " eps_mh=" + fmt(mod->eps) +
             " eps_rel_mh=" + fmt(mod->eps_rel) + " M=" + std::to_string(stats.samples);
  return o;
}

Outcome sigma_scaling() {
  const std::vector<double> sigmas{0.8, 1.6, 2.4, 3.2, 4.0};
  std::vector<double> eps;
  std::ostringstream d;
  for (double s : sigmas) {
    eps.push_back(modified_run(s).find(Method::modified)->eps);
    d << "eps(" << s << ")=" << fmt(eps.back()) << ' ';
  }
  bool pass = true;
  for (std::size_t i = 1; i < eps.size(); ++i) pass = pass && eps[i] > eps[i - 1];
  const double r1 = eps[1] / eps[0];  // 0.8 -> 1.6
  const double r2 = eps[3] / eps[1];  // 1.6 -> 3.2
  for (double r : {r1, r2}) pass = pass && r >= 2.5 && r <= 7.0;
  d << "ratio(0.8->1.6)=" << fmt(r1) << " ratio(1.6->3.2)=" << fmt(r2);
  return {pass, d.str()};
}

Outcome robustness() {
  McConfig cfg = base_config();
  cfg.samples = 50;
  cfg.sigma = 8.0;
  cfg.methods = {Method::monolithic, Method::split};
  cfg.monolithic_init = MonolithicInit::zero;
  const McStats stats = run_experiment(cfg);
  const MethodStats* split = stats.find(Method::split);
  const MethodStats* mono = stats.find(Method::monolithic);
  const double rate = static_cast<double>(split->converged) / cfg.samples;
  Outcome o;
  o.pass = rate >= 0.95 && split->eps <= 1e-10 && stats.max_split_gap <= 1e-10;
  o.detail = "split_converged=" + std::to_string(split->converged) + "/50 monolithic_failed=" +
             std::to_string(mono->failed) + " eps_sh=" + fmt(split->eps) + " max_rel_gap=" +
             fmt(stats.max_split_gap) + " kappa_mean=" + fmt(stats.kappa_mean);
  return o;
}

Outcome manufactured_convergence() {
  const auto t0 = Clock::now();
  const ConvergenceStudy study = convergence_study({4, 8, 16}, 0.02);
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = study.velocity_order >= 2.5 && study.pressure_order >= 1.5 && t < 120.0;
  o.detail = "velocity_order=" + fmt(study.velocity_order) + " pressure_order=" + fmt(study.pressure_order);
  for (const auto& r : study.rows) {
    o.detail += " n" + std::to_string(r.n) + ":u=" + fmt(r.velocity_error) + ",p=" + fmt(r.pressure_error);
  }
  return o;
}

Outcome trilinear() {
  bool pass = true;
  std::ostringstream d;
  for (int n : {2, 4, 8}) {
    const TrilinearCheck t = check_trilinear_identities(n, 20, kDefaultSeed);
    pass = pass && t.fields == 20 && t.max_self <= 1e-11 && t.max_skew <= 1e-11;
    d << "n" << n << ":self=" << fmt(t.max_self) << ",skew=" << fmt(t.max_skew) << ' ';
  }
  std::string s = d.str();
  s.pop_back();
  return {pass, s};
}

struct NoiseMoments {
  double worst_mean = 0.0;
  double var_lo = 1e9;
  double var_hi = 0.0;
  double worst_cov = 0.0;
  int means_outside = 0;
};

// Per-cell moments of zeta on the 12 x 12 grid; covariance pairs each cell
// with the next one, same component.
NoiseMoments noise_moments(int draws) {
  const NoiseGrid grid(12);
  const int vars = 2 * grid.num_cells();
  std::vector<double> sum(vars, 0.0), sq(vars, 0.0), cross(vars, 0.0);
  for (int s = 1; s <= draws; ++s) {
    const NoiseField f = sample_noise(grid, 1.0, kDefaultSeed, static_cast<std::uint64_t>(s));
    for (int i = 0; i < vars; ++i) {
      const double z = f.zeta[i / 2][i % 2];
      const int j = (i + 2) % vars;
      sum[i] += z;
      sq[i] += z * z;
      cross[i] += z * f.zeta[j / 2][j % 2];
    }
  }
  NoiseMoments m;
  for (int i = 0; i < vars; ++i) {
    const int j = (i + 2) % vars;
    const double mean = sum[i] / draws;
    const double var = sq[i] / draws - mean * mean;
    const double cov = cross[i] / draws - mean * sum[j] / draws;
    m.worst_mean = std::max(m.worst_mean, std::abs(mean));
    m.means_outside += std::abs(mean) > 0.03;
    m.var_lo = std::min(m.var_lo, var);
    m.var_hi = std::max(m.var_hi, var);
    m.worst_cov = std::max(m.worst_cov, std::abs(cov));
  }
  return m;
}

bool within_bounds(const NoiseMoments& m) {
  return m.worst_mean <= 0.03 && m.var_lo >= 0.95 && m.var_hi <= 1.05 && m.worst_cov <= 0.03;
}

std::string describe(const NoiseMoments& m) {
  return "max|mean|=" + fmt(m.worst_mean) + " var=[" + fmt(m.var_lo) + "," + fmt(m.var_hi) +
         "] max|cov|=" + fmt(m.worst_cov);
}

Outcome noise_statistics() {
  // At 1e4 draws the +-0.03 band is three standard errors, so among 288
  // per-cell means about 0.8 fall outside it for an exact N(0, 1) source.
  // The bounds are held on 1e5 draws per cell; the 1e4 figures are reported.
  const NoiseMoments small = noise_moments(10000);
  const NoiseMoments large = noise_moments(100000);
  const double expected_outside = 288 * std::erfc(3.0 / std::sqrt(2.0));
  Outcome o;
  o.pass = within_bounds(large);
  o.detail = "cells=144 draws=1e5 " + describe(large) + " | draws=1e4 " + describe(small) +
             " means_outside=" + std::to_string(small.means_outside) + " expected_outside=" +
             fmt(expected_outside);
  return o;
}

Outcome mean_closeness() {
  const FEField& xi = shared_experiment()->deterministic().field;
  std::vector<double> values;
  std::ostringstream d;
  for (double sigma : {0.4, 0.8, 1.6}) {
    McConfig cfg = base_config();
    cfg.samples = 1000;
    cfg.sigma = sigma;
    cfg.methods = {Method::monolithic};
    values.push_back(mean_closeness_check(xi, run_experiment(cfg, shared_experiment())));
    d << "closeness(" << sigma << ")=" << fmt(values.back()) << ' ';
  }
  const bool monotone = values[0] < values[1] && values[1] < values[2];

  McConfig cfg = base_config();
  cfg.samples = 100;
  cfg.sigma = 1.5;
  cfg.methods = {Method::monolithic};
  const double ratio =
      mean_closeness_check(xi, run_experiment(cfg, shared_experiment())) / velocity_l2_norm(xi);
  d << "ratio(1.5,M=100)=" << fmt(ratio);
  return {monotone && ratio < 0.1, d.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  McConfig cfg = base_config();
  cfg.samples = 40;
  cfg.sigma = 1.5;
  cfg.jobs = 1;
  const McStats one = run_experiment(cfg, shared_experiment());
  cfg.jobs = 8;
  const McStats eight = run_experiment(cfg, shared_experiment());
  double worst = 0.0;
  for (std::size_t i = 0; i < one.methods.size(); ++i) {
    worst = std::max(worst, (one.methods[i].mean.velocity() - eight.methods[i].mean.velocity())
                                .lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (one.methods[i].mean.pressure() - eight.methods[i].mean.pressure())
                                .lpNorm<Eigen::Infinity>());
  }

  // the same through the command line
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("sns_acceptance_" + std::to_string(std::random_device{}()));
  std::ostringstream sink;
  const std::vector<std::string> common{"mc", "--samples", "10", "--sigma", "1.5"};
  std::vector<std::string> a = common, b = common;
  a.insert(a.end(), {"--jobs", "1", "--out", (root / "j1").string()});
  b.insert(b.end(), {"--jobs", "8", "--out", (root / "j8").string()});
  const int ca = cli::run(a, sink, sink);
  const int cb = cli::run(b, sink, sink);
  bool same_files = ca == 0 && cb == 0;
  for (const char* f : {"stats.csv", "field_monolithic.csv", "field_split.csv", "field_modified.csv"}) {
    same_files = same_files && slurp(root / "j1" / f) == slurp(root / "j8" / f) && !slurp(root / "j1" / f).empty();
  }
  fs::remove_all(root);

  Outcome o;
  o.pass = worst <= 1e-13 && same_files;
  o.detail = "max_mean_diff=" + fmt(worst) + " cli_outputs_identical=" + (same_files ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  std::printf("workers=%d\n", jobs());
  report(1, splitting_equivalence);
  report(2, modified_magnitude);
  report(3, sigma_scaling);
  report(4, robustness);
  report(5, manufactured_convergence);
  report(6, trilinear);
  report(7, noise_statistics);
  report(8, mean_closeness);
  report(9, determinism);
  std::printf("acceptance: %d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
