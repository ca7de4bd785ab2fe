#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navkf/qnukf.hpp"
#include "navkf/sim.hpp"

namespace navkf {

/// One timestamped full state; the row layout of truth.csv/estimates.csv
/// (EuRoC ground-truth ordering: t, p, q wxyz, v, b_w, b_a).
struct StateRow {
  std::int64_t t_ns = 0;
  NavState x;
};

struct DatasetMeta {
  double imu_rate = 0.0;
  double cam_rate = 0.0;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::string frames_note;
};

/// A loaded dataset: time-sorted IMU and feature streams plus optional
/// ground truth.
struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<FeatureFrame> frames;
  std::vector<StateRow> truth;  // empty when no truth file is present
  DatasetMeta meta;
};

// ---- CSV streams -----------------------------------------------------------

/// Rows `timestamp_ns,w_x,w_y,w_z,a_x,a_y,a_z`; one header line tolerated.
/// Throws ParseError (with line number) and NonMonotoneTime.
std::vector<ImuSample> read_imu_csv(const std::string& path);
void write_imu_csv(const std::string& path,
                   const std::vector<ImuSample>& samples);

/// 17-column state rows; quaternion must be unit within 1e-6 per row.
std::vector<StateRow> read_state_csv(const std::string& path);
void write_state_csv(const std::string& path,
                     const std::vector<StateRow>& rows);

/// Map rows `id,x,y,z`; observation rows `timestamp_ns,id,fb_x,fb_y,fb_z`
/// grouped by timestamp. Every observed id must exist in the map
/// (UnknownFeatureId otherwise); world coordinates are joined in from the map.
std::pair<WorldMap, std::vector<FeatureFrame>> read_feature_frames(
    const std::string& path_map, const std::string& path_obs);
void write_feature_map(const std::string& path, const WorldMap& map);
void write_feature_obs(const std::string& path,
                       const std::vector<FeatureFrame>& frames);

void write_meta_json(const std::string& path, const DatasetMeta& meta);
DatasetMeta read_meta_json(const std::string& path);

void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diag);
std::vector<StepDiagnostics> read_diagnostics_csv(const std::string& path);

/// Load imu.csv, features_map.csv, features_obs.csv, meta.json and, when
/// present, truth.csv from a dataset directory.
Dataset read_dataset(const std::string& dir);

// ---- metrics ---------------------------------------------------------------

struct ErrorRow {
  std::int64_t t_ns = 0;
  Vec3 r_e = Vec3::Zero();  // attitude error rotation vector, truth vs estimate
  Vec3 p_e = Vec3::Zero();
  Vec3 v_e = Vec3::Zero();
  double e = 0.0;  // ||r_e|| + ||p_e|| + ||v_e||
};

struct Metrics {
  double rmse = 0.0;
  double ssrmse = 0.0;  // over the final 20 s of timestamps
  std::size_t steps = 0;
  bool ssrmse_window_truncated = false;  // run shorter than the window
  std::vector<ErrorRow> rows;
};

/// Per-step errors r_e = q (-) q_hat, p_e = p - p_hat, v_e = v - v_hat and
/// the RMSE of e_k over all steps plus the steady-state RMSE over the final
/// 20 seconds. Series must agree on timestamps exactly (MisalignedSeries).
Metrics compute_metrics(const std::vector<StateRow>& estimates,
                        const std::vector<StateRow>& truth);

/// errors.csv: `t,re_x,re_y,re_z,pe_x,..,ve_z,re_norm,pe_norm,ve_norm,trace_p`.
/// trace_p entries align 1:1 with the estimate rows.
void write_errors_csv(const std::string& path, const Metrics& metrics,
                      const std::vector<double>& trace_p);

/// metrics.json with only run-deterministic fields.
void write_metrics_json(const std::string& path, const Metrics& metrics);

/// summary.json: metrics plus wall-clock runtime.
void write_summary_json(const std::string& path, const Metrics& metrics,
                        double runtime_ms);

// ---- configuration ---------------------------------------------------------

enum class InitMode { kExplicit, kTruth };

/// Filter-run configuration parsed from a flat key-value file.
struct RunConfig {
  NoiseConfig noise;
  double ut_lambda = 3.0 - kAugTangentDim;
  double ut_alpha = 1e-4;
  double ut_beta = 2.0;
  InitMode init_mode = InitMode::kExplicit;
  NavState x0;
  Vec15 p0_diag = Vec15::Zero();
  // truth-mode initialization: offsets applied to the first truth row
  Vec3 init_att_offset = Vec3::Zero();
  Vec3 init_pos_offset = Vec3::Zero();
  Vec3 init_vel_offset = Vec3::Zero();
  bool eigenvalue_floor = false;
  bool scale_bias_walk_with_dt = false;
  std::optional<std::string> dataset_dir;
  std::optional<std::string> out_dir;

  Mat15 p0() const { return p0_diag.asDiagonal(); }
  UtParams ut_params() const {
    return UtParams{ut_lambda, ut_alpha, ut_beta, kAugTangentDim};
  }
};

/// Unknown keys are rejected with ParseError.
RunConfig read_run_config(const std::string& path);

/// Simulation scenario: trajectory plus world layout, sensor noise, and
/// initial bias truth, parsed from the same key-value format.
struct SimScenario {
  TrajectorySpec traj;
  NoiseConfig noise;
  FeatureGenOptions features;
  int world_features = 60;
  Vec3 world_box = Vec3(10.0, 10.0, 4.0);
  Vec3 b0_gyro = Vec3::Zero();
  Vec3 b0_accel = Vec3::Zero();
};

SimScenario read_sim_scenario(const std::string& path);

}  // namespace navkf
