#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sns/assembly.hpp"
#include "sns/manufactured.hpp"
#include "sns/noise.hpp"
#include "sns/solvers.hpp"
#include "sns/uq.hpp"
#include "sns/verify.hpp"

namespace sns::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string method = "deterministic";
  std::vector<std::string> methods{"monolithic", "split", "modified"};
  double nu = 0.02;
  double sigma = 1.5;
  std::string sigma_scale = "pointwise";
  int mesh_n = 12;
  int noise_n = 12;
  std::vector<int> samples{100};
  std::vector<double> sigma_sweep;
  long sample = 1;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
  std::string init = "deterministic";
  double newton_tol = 1e-12;
  int max_iter = 25;
  std::string out_dir = "out";
  std::string config;
  bool convergence = false;
  bool mutate = false;
  int fields = 20;
};

void add_problem_options(CLI::App& app, RunSpec& spec) {
  app.add_option("--nu", spec.nu, "kinematic viscosity")->check(CLI::PositiveNumber);
  app.add_option("--sigma", spec.sigma, "noise intensity")->check(CLI::NonNegativeNumber);
  app.add_option("--sigma-scale", spec.sigma_scale,
                 "pointwise: sigma is the per-cell std. dev.; white: amplitude in the white-noise sum")
      ->check(CLI::IsMember({"pointwise", "white"}));
  app.add_option("--mesh-n", spec.mesh_n, "cells per side")->check(CLI::Range(1, 1024));
  app.add_option("--noise-n", spec.noise_n, "noise cells per side, must divide --mesh-n (default: --mesh-n)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--seed", spec.seed, "base seed for every noise stream");
  app.add_option("--newton-tol", spec.newton_tol, "absolute and relative Newton tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", spec.max_iter, "Newton iteration cap")->check(CLI::Range(1, 1000));
  app.add_option("--init", spec.init, "monolithic Newton initial guess")
      ->check(CLI::IsMember({"deterministic", "zero"}));
  app.add_option("--out", spec.out_dir, "output directory");
  app.add_option("--config", spec.config, "JSON file with option values; flags win")
      ->check(CLI::ExistingFile);
}

void add_mc_options(CLI::App& app, RunSpec& spec) {
  app.add_option("--samples", spec.samples, "Monte Carlo sizes, e.g. 50,100,200")
      ->delimiter(',')
      ->check(CLI::Range(1, 10000000));
  app.add_option("--sigma-sweep", spec.sigma_sweep, "list of sigma values")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  app.add_option("--methods", spec.methods, "subset of monolithic,split,modified")
      ->delimiter(',')
      ->check(CLI::IsMember({"monolithic", "split", "modified"}));
  app.add_option("--jobs", spec.jobs, "worker threads")->check(CLI::Range(1, 1024));
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("--config: unsupported value " + v.dump());
}

// Fills options not given on the command line from the JSON file.
void apply_config(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("--config: " + path + ": invalid JSON");
  }
  if (!doc.is_object()) throw UsageError("--config: " + path + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    std::string name = key;
    for (char& c : name) {
      if (c == '_') c = '-';
    }
    if (name == "config") throw UsageError("--config: nested config files are not supported");
    CLI::Option* opt = app.get_option_no_throw("--" + name);
    if (!opt) throw UsageError("--config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::vector<std::string> results;
    if (value.is_array()) {
      for (const auto& v : value) results.push_back(json_scalar(v));
    } else {
      results.push_back(json_scalar(value));
    }
    try {
      for (auto& r : results) opt->add_result(r);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(std::string("--config: ") + e.what());
    }
  }
}

McConfig to_mc_config(const RunSpec& spec) {
  McConfig cfg;
  cfg.samples = spec.samples.empty() ? 1 : spec.samples.back();
  cfg.base_seed = spec.seed;
  cfg.sigma = spec.sigma;
  cfg.noise_scale = parse_noise_scale(spec.sigma_scale);
  cfg.nu = spec.nu;
  cfg.mesh_n = spec.mesh_n;
  cfg.noise_n = spec.noise_n;
  cfg.methods.clear();
  for (const auto& m : spec.methods) {
    const Method method = parse_method(m);
    if (!cfg.has(method)) cfg.methods.push_back(method);
  }
  cfg.newton.abs_tol = spec.newton_tol;
  cfg.newton.rel_tol = spec.newton_tol;
  cfg.newton.max_iter = spec.max_iter;
  cfg.monolithic_init = spec.init == "zero" ? MonolithicInit::zero : MonolithicInit::deterministic;
  cfg.jobs = spec.jobs;
  return cfg;
}

void validate(const RunSpec& spec) {
  if (spec.mesh_n % spec.noise_n != 0) {
    throw UsageError("--noise-n: must divide --mesh-n (" + std::to_string(spec.noise_n) +
                     " does not divide " + std::to_string(spec.mesh_n) + ")");
  }
  if (spec.methods.empty()) throw UsageError("--methods: at least one method is required");
}

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path prepare_out(const RunSpec& spec) {
  const fs::path dir(spec.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string sigma_tag(double sigma) {
  std::ostringstream s;
  s << sigma;
  return s.str();
}

void write_reports(const fs::path& path, const std::vector<SolveReport>& reports) {
  write_atomic(path, [&](std::ostream& o) {
    write_report_csv_header(o);
    for (const auto& r : reports) write_report_csv_row(o, r);
  });
}

void print_diagnostics(std::ostream& out, const Diagnostics& d) {
  out << "force_norm=" << d.force_norm << "\n"
      << "smallness_indicator=" << d.indicator << "\n"
      << "split_condition=" << (d.split_ok ? "pass" : "fail") << "\n"
      << "modified_condition=" << (d.modified_ok ? "pass" : "fail") << "\n";
}

// Null when xi does not converge; its report then goes to samples.csv.
std::shared_ptr<const Experiment> build_experiment(const McConfig& cfg, const fs::path& dir,
                                                   std::ostream& out) {
  try {
    return std::make_shared<const Experiment>(cfg.mesh_n, cfg.nu, cfg.newton);
  } catch (const DeterministicSolveError& e) {
    write_reports(dir / "samples.csv", {e.report()});
    out << "deterministic_converged=0\n"
        << "status=" << to_string(e.report().status) << "\n"
        << "iterations=" << e.report().iterations << "\n"
        << "final_residual=" << e.report().final_residual << "\n";
    return nullptr;
  }
}

int cmd_solve(const RunSpec& spec, std::ostream& out) {
  const fs::path dir = prepare_out(spec);
  McConfig cfg = to_mc_config(spec);
  out << "method=" << spec.method << "\n";
  const auto experiment = build_experiment(cfg, dir, out);
  if (!experiment) return kNotConverged;
  const Solved<FEField>& xi = experiment->deterministic();

  if (spec.method == "deterministic") {
    write_atomic(dir / "field_deterministic.csv", [&](std::ostream& o) { write_field_csv(o, xi.field); });
    write_reports(dir / "samples.csv", {xi.report});
    out << "converged=" << xi.report.converged << "\n"
        << "iterations=" << xi.report.iterations << "\n"
        << "final_residual=" << xi.report.final_residual << "\n"
        << "velocity_error=" << l2_error(xi.field, VectorFunction(&ExactSolution::velocity)) << "\n"
        << "pressure_error=" << pressure_l2_error(xi.field, ScalarFunction(&ExactSolution::pressure))
        << "\n";
    return kOk;
  }

  const NoiseField noise = sample_noise(NoiseGrid(cfg.noise_n), cfg.noise_amplitude(), cfg.base_seed,
                                        static_cast<std::uint64_t>(spec.sample));
  const Eigen::VectorXd load = assemble_noise_load(experiment->mesh(), experiment->dofs(), noise);
  const FlowSolver& solver = experiment->solver();
  Solved<FEField> result{FEField(experiment->dofs()), {}};
  FEField velocity(experiment->dofs());
  const Method method = parse_method(spec.method);
  if (method == Method::monolithic) {
    const FEField init = cfg.monolithic_init == MonolithicInit::zero ? FEField(experiment->dofs()) : xi.field;
    result = solver.solve_monolithic(experiment->force_load(), load, cfg.newton, init);
    velocity = result.field;
  } else if (method == Method::split) {
    result = solver.solve_stochastic_full(xi.field, load, cfg.newton);
    velocity = xi.field + result.field;
  } else {
    result = solver.solve_stochastic_modified(xi.field, load);
    velocity = xi.field + result.field;
  }
  result.report.sample_id = spec.sample;
  write_atomic(dir / ("field_" + spec.method + ".csv"), [&](std::ostream& o) { write_field_csv(o, velocity); });
  write_atomic(dir / "noise.csv", [&](std::ostream& o) { write_noise_csv(o, noise); });
  write_reports(dir / "samples.csv", {result.report});
  out << "sample=" << spec.sample << "\n"
      << "sigma=" << cfg.sigma << "\n"
      << "noise_amplitude=" << cfg.noise_amplitude() << "\n"
      << "kappa=" << noise_l2_norm(noise) / experiment->force_norm() << "\n"
      << "converged=" << result.report.converged << "\n"
      << "status=" << to_string(result.report.status) << "\n"
      << "iterations=" << result.report.iterations << "\n"
      << "final_residual=" << result.report.final_residual << "\n";
  return result.report.converged ? kOk : kNotConverged;
}

double method_eps(const McStats& s, Method m, bool relative) {
  const MethodStats* ms = s.find(m);
  if (!ms) return std::numeric_limits<double>::quiet_NaN();
  return relative ? ms->eps_rel : ms->eps;
}

int cmd_mc(const RunSpec& spec, std::ostream& out) {
  McConfig base = to_mc_config(spec);
  base.validate();
  const fs::path dir = prepare_out(spec);
  const auto experiment = build_experiment(base, dir, out);
  if (!experiment) return kNotConverged;
  const Diagnostics diag = diagnostics_from_norm(experiment->force_norm(), base.nu);
  out << "nu=" << base.nu << "\n"
      << "mesh_n=" << base.mesh_n << "\n"
      << "noise_n=" << base.noise_n << "\n"
      << "seed=" << base.base_seed << "\n"
      << "sigma_scale=" << to_string(base.noise_scale) << "\n";
  print_diagnostics(out, diag);

  std::vector<double> sigmas = spec.sigma_sweep;
  const bool sweep = !sigmas.empty();
  if (!sweep) sigmas.push_back(spec.sigma);

  std::ostringstream stats_csv;
  write_stats_header(stats_csv);
  bool any_failure = false;
  for (double sigma : sigmas) {
    McConfig cfg = base;
    cfg.sigma = sigma;
    const std::vector<McStats> series = run_experiment_series(cfg, experiment, spec.samples);
    for (const auto& s : series) {
      write_stats_rows(stats_csv, s);
      out << "sigma=" << s.sigma << " M=" << s.samples << " kappa_mean=" << s.kappa_mean
          << " eps_sh=" << method_eps(s, Method::split, false)
          << " eps_mh=" << method_eps(s, Method::modified, false)
          << " eps_rel_sh=" << method_eps(s, Method::split, true)
          << " eps_rel_mh=" << method_eps(s, Method::modified, true);
      for (const auto& ms : s.methods) out << " failures_" << to_string(ms.method) << '=' << ms.failed;
      out << "\n";
    }
    const McStats& last = series.back();
    const std::string suffix = sweep ? "_sigma" + sigma_tag(sigma) : "";
    write_reports(dir / ("samples" + suffix + ".csv"), last.reports);
    for (const auto& ms : last.methods) {
      any_failure = any_failure || ms.failed > 0;
      write_atomic(dir / ("field_" + std::string(to_string(ms.method)) + suffix + ".csv"),
                   [&](std::ostream& o) { write_field_csv(o, ms.mean); });
    }
  }
  write_atomic(dir / "field_deterministic.csv",
               [&](std::ostream& o) { write_field_csv(o, experiment->deterministic().field); });
  write_atomic(dir / "stats.csv", [&](std::ostream& o) { o << stats_csv.str(); });
  return any_failure ? kNotConverged : kOk;
}

int cmd_verify(const RunSpec& spec, std::ostream& out) {
  VerifyOptions options;
  options.convergence = spec.convergence;
  options.mutate = spec.mutate;
  options.seed = spec.seed;
  options.jobs = spec.jobs;
  options.trilinear_fields = spec.fields;
  options.nu = spec.nu;
  const std::vector<CheckResult> checks = run_verification(options);
  int failed = 0;
  for (const auto& c : checks) {
    write_check_line(out, c);
    if (!c.passed) ++failed;
  }
  out << "verify=" << (failed ? "fail" : "pass") << " checks=" << checks.size()
      << " failed=" << failed << "\n";
  return failed ? kNotConverged : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  CLI::App app{"Steady stochastic Navier-Stokes: splitting schemes and Monte Carlo driver", "sns"};
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "one deterministic solve or one noise sample");
  add_problem_options(*solve, spec);
  solve->add_option("--method", spec.method)
      ->check(CLI::IsMember({"deterministic", "monolithic", "split", "modified"}));
  solve->add_option("--sample", spec.sample, "noise stream id")->check(CLI::Range(0L, 1L << 40));

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo statistics against the monolithic mean");
  add_problem_options(*mc, spec);
  add_mc_options(*mc, spec);

  CLI::App* sweep = app.add_subcommand("sweep", "mc over a list of sigma values");
  add_problem_options(*sweep, spec);
  add_mc_options(*sweep, spec);

  CLI::App* verify = app.add_subcommand("verify", "verification battery");
  verify->add_flag("--convergence", spec.convergence, "add the n = 4, 8, 16 refinement study");
  verify->add_flag("--mutate", spec.mutate, "inject a sign error into the convection assembly");
  verify->add_option("--seed", spec.seed);
  verify->add_option("--jobs", spec.jobs)->check(CLI::Range(1, 1024));
  verify->add_option("--nu", spec.nu)->check(CLI::PositiveNumber);
  verify->add_option("--fields", spec.fields, "random fields per mesh")->check(CLI::Range(1, 10000));

  std::vector<const char*> argv{"sns"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    CLI::App* active = app.get_subcommands().front();
    if (!spec.config.empty()) apply_config(*active, spec.config);
    if (active != verify && active->get_option("--noise-n")->count() == 0) spec.noise_n = spec.mesh_n;
    if (active == sweep && spec.sigma_sweep.empty()) spec.sigma_sweep = {0.8, 1.6, 2.4, 3.2, 4.0, 8.0};
    if (active != verify) validate(spec);

    out << std::setprecision(10);
    if (active == solve) return cmd_solve(spec, out);
    if (active == verify) return cmd_verify(spec, out);
    return cmd_mc(spec, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: " << msg << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

}  // namespace sns::cli
