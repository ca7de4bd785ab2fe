#pragma once

#include <functional>
#include <string>

#include "navkf/dataset_io.hpp"
#include "navkf/ekf.hpp"

namespace navkf {

enum class FilterKind { kQnukf, kEkf };

/// Output of one filter pass over a dataset. estimates[0] is the initial
/// state; subsequent rows follow the IMU timestamps. trace_p aligns 1:1
/// with estimates.
struct RunResult {
  std::vector<StateRow> estimates;
  std::vector<double> trace_p;
  std::vector<StepDiagnostics> diagnostics;
  double runtime_ms = 0.0;
};

/// The initial estimate per config: explicit values, or the first truth row
/// with the configured attitude/position/velocity offsets applied and the
/// biases taken from the explicit init values.
std::pair<NavState, std::int64_t> initial_state(const RunConfig& cfg,
                                                const Dataset& ds);

/// Stream the dataset through the chosen filter: predict on every IMU
/// sample, update when a feature frame's timestamp has been reached.
/// `observer`, when set, sees every stored estimate (including the initial
/// one) as the run progresses.
RunResult run_filter(const Dataset& ds, const RunConfig& cfg, FilterKind kind,
                     const std::function<void(const FilterEstimate&)>&
                         observer = {});

/// Write estimates.csv and diagnostics.csv into dir; when truth is
/// nonempty, also errors.csv and summary.json (which carries wall time).
/// Returns the metrics when truth was available.
std::optional<Metrics> write_run_outputs(const std::string& dir,
                                         const RunResult& result,
                                         const std::vector<StateRow>& truth);

/// Generate a synthetic dataset in memory.
Dataset build_dataset(const SimScenario& scenario);

/// Generate and write a full synthetic dataset (imu.csv, features_map.csv,
/// features_obs.csv, truth.csv, meta.json) under out_dir.
void simulate_dataset(const SimScenario& scenario, const std::string& out_dir);

struct ComparisonRow {
  std::string filter;
  Metrics metrics;
};

/// Run both filters with identical config and write comparison.json plus an
/// aligned-text comparison.txt (EKF row first) along with each filter's run
/// outputs under <out_dir>/ekf and <out_dir>/qnukf.
std::vector<ComparisonRow> compare_filters(const Dataset& ds,
                                           const RunConfig& cfg,
                                           const std::string& out_dir);

}  // namespace navkf
