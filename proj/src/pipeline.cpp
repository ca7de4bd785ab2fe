#include "navkf/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace navkf {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point from) {
  return std::chrono::duration<double, std::micro>(Clock::now() - from)
      .count();
}

std::int64_t infer_t0(const Dataset& ds) {
  if (!ds.truth.empty()) return ds.truth.front().t_ns;
  if (ds.meta.imu_rate > 0.0) {
    return ds.imu.front().t_ns -
           static_cast<std::int64_t>(std::llround(1e9 / ds.meta.imu_rate));
  }
  if (ds.imu.size() >= 2) {
    return ds.imu.front().t_ns - (ds.imu[1].t_ns - ds.imu[0].t_ns);
  }
  throw Error("cannot infer the initial timestamp for this dataset");
}

}  // namespace

std::pair<NavState, std::int64_t> initial_state(const RunConfig& cfg,
                                                const Dataset& ds) {
  if (ds.imu.empty()) throw Error("dataset has no IMU samples");
  const std::int64_t t0 = infer_t0(ds);
  if (cfg.init_mode == InitMode::kExplicit) {
    return {cfg.x0, t0};
  }
  if (ds.truth.empty()) {
    throw Error("init_mode = truth requires a dataset with truth.csv");
  }
  const NavState& ref = ds.truth.front().x;
  NavState x0;
  x0.q = oplus(ref.q, cfg.init_att_offset);
  x0.p = ref.p + cfg.init_pos_offset;
  x0.v = ref.v + cfg.init_vel_offset;
  x0.b_w = cfg.x0.b_w;  // biases are never known from truth
  x0.b_a = cfg.x0.b_a;
  return {x0, ds.truth.front().t_ns};
}

RunResult run_filter(const Dataset& ds, const RunConfig& cfg, FilterKind kind,
                     const std::function<void(const FilterEstimate&)>&
                         observer) {
  const auto [x0, t0] = initial_state(cfg, ds);
  const Mat15 p0 = cfg.p0();

  std::optional<Qnukf> qnukf;
  std::optional<NavEkf> ekf;
  if (kind == FilterKind::kQnukf) {
    QnukfOptions opt;
    opt.ut = cfg.ut_params();
    opt.eigenvalue_floor = cfg.eigenvalue_floor;
    opt.scale_bias_walk_with_dt = cfg.scale_bias_walk_with_dt;
    qnukf.emplace(x0, p0, cfg.noise, opt, t0);
  } else {
    EkfOptions opt;
    opt.scale_bias_walk_with_dt = cfg.scale_bias_walk_with_dt;
    ekf.emplace(x0, p0, cfg.noise, opt, t0);
  }
  const auto current = [&]() -> const FilterEstimate& {
    return qnukf ? qnukf->estimate() : ekf->estimate();
  };

  RunResult result;
  result.estimates.reserve(ds.imu.size() + 1);
  result.trace_p.reserve(ds.imu.size() + 1);
  result.estimates.push_back({t0, x0});
  result.trace_p.push_back(current().p.trace());
  if (observer) observer(current());

  const auto run_start = Clock::now();
  size_t frame_idx = 0;
  for (const ImuSample& u : ds.imu) {
    std::optional<FeatureFrame> frame;
    while (frame_idx < ds.frames.size() &&
           ds.frames[frame_idx].t_ns <= u.t_ns) {
      frame = ds.frames[frame_idx];  // latest frame due at this sample
      ++frame_idx;
    }
    const auto step_start = Clock::now();
    const FilterEstimate& est =
        qnukf ? qnukf->step(u, frame) : ekf->step(u, frame);
    const double us = elapsed_us(step_start);
    auto& diag = qnukf ? qnukf->diagnostics() : ekf->diagnostics();
    diag.back().step_us = us;

    result.estimates.push_back({est.t_ns, est.x});
    result.trace_p.push_back(est.p.trace());
    if (observer) observer(est);
  }
  result.runtime_ms = elapsed_us(run_start) / 1e3;
  result.diagnostics = qnukf ? qnukf->diagnostics() : ekf->diagnostics();
  return result;
}

std::optional<Metrics> write_run_outputs(const std::string& dir,
                                         const RunResult& result,
                                         const std::vector<StateRow>& truth) {
  std::filesystem::create_directories(dir);
  write_state_csv(dir + "/estimates.csv", result.estimates);
  write_diagnostics_csv(dir + "/diagnostics.csv", result.diagnostics);
  if (truth.empty()) return std::nullopt;
  Metrics metrics = compute_metrics(result.estimates, truth);
  write_errors_csv(dir + "/errors.csv", metrics, result.trace_p);
  write_summary_json(dir + "/summary.json", metrics, result.runtime_ms);
  return metrics;
}

Dataset build_dataset(const SimScenario& scenario) {
  const auto truth = generate_truth(scenario.traj, scenario.noise.gravity);
  auto [imu, bias] =
      synthesize_imu(truth, scenario.noise, scenario.traj.seed,
                     scenario.b0_gyro, scenario.b0_accel);
  const WorldMap world = default_world(scenario.traj.seed,
                                       scenario.world_features,
                                       scenario.world_box);

  Dataset ds;
  ds.imu = std::move(imu);
  ds.frames = synthesize_features(truth, world, scenario.noise, scenario.traj,
                                  scenario.features);
  ds.truth.resize(truth.size());
  for (size_t k = 0; k < truth.size(); ++k) {
    ds.truth[k].t_ns = truth[k].t_ns;
    ds.truth[k].x = truth[k].x;
    ds.truth[k].x.b_w = bias[k].b_w;
    ds.truth[k].x.b_a = bias[k].b_a;
  }
  ds.meta.imu_rate = scenario.traj.imu_rate;
  ds.meta.cam_rate = scenario.traj.cam_rate;
  ds.meta.duration = scenario.traj.duration;
  ds.meta.seed = scenario.traj.seed;
  ds.meta.frames_note =
      "world frame z-up with gravity along -z; attitude quaternion is "
      "body-to-world, Hamilton, scalar-first (w,x,y,z)";
  return ds;
}

void simulate_dataset(const SimScenario& scenario,
                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Dataset ds = build_dataset(scenario);
  const WorldMap world = default_world(scenario.traj.seed,
                                       scenario.world_features,
                                       scenario.world_box);
  write_imu_csv(out_dir + "/imu.csv", ds.imu);
  write_feature_map(out_dir + "/features_map.csv", world);
  write_feature_obs(out_dir + "/features_obs.csv", ds.frames);
  write_state_csv(out_dir + "/truth.csv", ds.truth);
  write_meta_json(out_dir + "/meta.json", ds.meta);
}

std::vector<ComparisonRow> compare_filters(const Dataset& ds,
                                           const RunConfig& cfg,
                                           const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (ds.truth.empty()) {
    throw Error("compare requires a dataset with truth.csv");
  }

  std::vector<ComparisonRow> rows;
  for (const auto& [name, kind] :
       {std::pair<std::string, FilterKind>{"ekf", FilterKind::kEkf},
        std::pair<std::string, FilterKind>{"qnukf", FilterKind::kQnukf}}) {
    const RunResult result = run_filter(ds, cfg, kind);
    const auto metrics = write_run_outputs(out_dir + "/" + name, result,
                                           ds.truth);
    rows.push_back({name, *metrics});
  }

  nlohmann::json j = nlohmann::json::array();
  for (const ComparisonRow& row : rows) {
    j.push_back({{"filter", row.filter},
                 {"rmse", row.metrics.rmse},
                 {"ssrmse", row.metrics.ssrmse},
                 {"steps", row.metrics.steps}});
  }
  std::ofstream jf(out_dir + "/comparison.json");
  jf << j.dump(2) << "\n";

  std::ofstream tf(out_dir + "/comparison.txt");
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %12s %12s\n", "filter", "rmse",
                "ssrmse");
  tf << line;
  for (const ComparisonRow& row : rows) {
    std::snprintf(line, sizeof(line), "%-8s %12.6f %12.6f\n",
                  row.filter.c_str(), row.metrics.rmse, row.metrics.ssrmse);
    tf << line;
  }
  return rows;
}

}  // namespace navkf
