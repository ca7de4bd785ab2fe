#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include <CLI11.hpp>

#include "navkf/pipeline.hpp"

namespace {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("NAV_LOG");
    if (!env) return LogLevel::kWarn;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "warn") == 0) return LogLevel::kWarn;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    std::fprintf(stderr, "warning: unrecognized NAV_LOG value '%s'\n", env);
    return LogLevel::kWarn;
  }();
  return level;
}

template <typename... Args>
void log_line(LogLevel level, const char* fmt, Args... args) {
  if (level > log_threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] ", names[static_cast<int>(level)]);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

struct SimulateArgs {
  std::string spec_path;
  std::string out_dir;
  std::int64_t seed = -1;  // <0: keep the spec file's seed
};

struct RunArgs {
  std::string dataset_dir;
  std::string filter;
  std::string config_path;
  std::string out_dir;
};

struct EvaluateArgs {
  std::string run_dir;
  std::string truth_path;
};

struct CompareArgs {
  std::string dataset_dir;
  std::string config_path;
  std::string out_dir;
};

int do_simulate(const SimulateArgs& args) {
  navkf::SimScenario scenario = navkf::read_sim_scenario(args.spec_path);
  if (args.seed >= 0) {
    scenario.traj.seed = static_cast<std::uint64_t>(args.seed);
  }
  navkf::simulate_dataset(scenario, args.out_dir);
  log_line(LogLevel::kInfo, "dataset written to %s", args.out_dir.c_str());
  std::printf("wrote dataset to %s\n", args.out_dir.c_str());
  return 0;
}

int do_run(const RunArgs& args) {
  const navkf::Dataset ds = navkf::read_dataset(args.dataset_dir);
  navkf::RunConfig cfg = navkf::read_run_config(args.config_path);
  const navkf::FilterKind kind = args.filter == "qnukf"
                                     ? navkf::FilterKind::kQnukf
                                     : navkf::FilterKind::kEkf;
  log_line(LogLevel::kInfo, "running %s over %zu IMU samples, %zu frames",
           args.filter.c_str(), ds.imu.size(), ds.frames.size());
  const navkf::RunResult result = navkf::run_filter(ds, cfg, kind);
  const auto metrics = navkf::write_run_outputs(args.out_dir, result, ds.truth);
  if (metrics) {
    std::printf("%s: rmse %.9g ssrmse %.9g steps %zu runtime %.1f ms\n",
                args.filter.c_str(), metrics->rmse, metrics->ssrmse,
                metrics->steps, result.runtime_ms);
  } else {
    std::printf("%s: %zu estimates, runtime %.1f ms (no truth available)\n",
                args.filter.c_str(), result.estimates.size(),
                result.runtime_ms);
  }
  return 0;
}

int do_evaluate(const EvaluateArgs& args) {
  const auto estimates =
      navkf::read_state_csv(args.run_dir + "/estimates.csv");
  const auto truth = navkf::read_state_csv(args.truth_path);
  const navkf::Metrics metrics = navkf::compute_metrics(estimates, truth);

  // Join the stored covariance trace back in when diagnostics exist; the
  // initial row has no diagnostic and reports zero.
  std::vector<double> trace_p(metrics.rows.size(), 0.0);
  std::ifstream diag_probe(args.run_dir + "/diagnostics.csv");
  if (diag_probe.good()) {
    std::unordered_map<std::int64_t, double> by_time;
    for (const auto& d :
         navkf::read_diagnostics_csv(args.run_dir + "/diagnostics.csv")) {
      by_time[d.t_ns] = d.trace_p;
    }
    for (size_t i = 0; i < metrics.rows.size(); ++i) {
      const auto it = by_time.find(metrics.rows[i].t_ns);
      if (it != by_time.end()) trace_p[i] = it->second;
    }
  }
  navkf::write_metrics_json(args.run_dir + "/metrics.json", metrics);
  navkf::write_errors_csv(args.run_dir + "/errors.csv", metrics, trace_p);
  std::printf("rmse %.9g ssrmse %.9g steps %zu%s\n", metrics.rmse,
              metrics.ssrmse, metrics.steps,
              metrics.ssrmse_window_truncated ? " (window truncated)" : "");
  return 0;
}

int do_compare(const CompareArgs& args) {
  const navkf::Dataset ds = navkf::read_dataset(args.dataset_dir);
  const navkf::RunConfig cfg = navkf::read_run_config(args.config_path);
  const auto rows = navkf::compare_filters(ds, cfg, args.out_dir);
  std::printf("%-8s %12s %12s\n", "filter", "rmse", "ssrmse");
  for (const auto& row : rows) {
    std::printf("%-8s %12.6f %12.6f\n", row.filter.c_str(), row.metrics.rmse,
                row.metrics.ssrmse);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QNUKF visual-inertial navigation toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "generate a synthetic dataset from a trajectory spec");
  sim->add_option("--spec", sim_args.spec_path, "trajectory spec file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_args.out_dir, "output dataset directory")
      ->required();
  sim->add_option("--seed", sim_args.seed, "override the spec file's seed");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a filter over a dataset");
  run->add_option("--dataset", run_args.dataset_dir, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  run->add_option("--filter", run_args.filter, "filter to run")
      ->required()
      ->check(CLI::IsMember({"qnukf", "ekf"}));
  run->add_option("--config", run_args.config_path, "run config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out_dir, "output directory")->required();

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "compute error metrics for a finished run");
  eval->add_option("--run", eval_args.run_dir, "run output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--truth", eval_args.truth_path, "ground-truth state csv")
      ->required()
      ->check(CLI::ExistingFile);

  CompareArgs cmp_args;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run both filters with identical config and tabulate");
  cmp->add_option("--dataset", cmp_args.dataset_dir, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmp->add_option("--config", cmp_args.config_path, "run config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--out", cmp_args.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return do_simulate(sim_args);
    if (run->parsed()) return do_run(run_args);
    if (eval->parsed()) return do_evaluate(eval_args);
    if (cmp->parsed()) return do_compare(cmp_args);
  } catch (const navkf::Error& e) {
    log_line(LogLevel::kError, "%s", e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
