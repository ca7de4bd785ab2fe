#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "navkf/dataset_io.hpp"
#include "oracle_helpers.hpp"

using namespace navkf;
using oracle::Rng;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("navkf_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void put(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("imu csv") {
  TempDir tmp;
  SUBCASE("empty file gives an empty stream") {
    put(tmp.file("imu.csv"), "");
    CHECK(read_imu_csv(tmp.file("imu.csv")).empty());
  }
  SUBCASE("direct field mapping, header tolerated") {
    put(tmp.file("imu.csv"),
        "#timestamp,w_x,w_y,w_z,a_x,a_y,a_z\n"
        "5000000,0,0,0,0,0,9.81\n");
    const auto imu = read_imu_csv(tmp.file("imu.csv"));
    REQUIRE(imu.size() == 1);
    CHECK(imu[0].t_ns == 5'000'000);
    CHECK(imu[0].accel_m(2) == doctest::Approx(9.81));

    put(tmp.file("imu2.csv"),
        "timestamp,w_x,w_y,w_z,a_x,a_y,a_z\n"
        "5000000,0.25,0,0,0,0,9.81\n");
    CHECK(read_imu_csv(tmp.file("imu2.csv"))[0].omega_m(0) ==
          doctest::Approx(0.25));
  }
  SUBCASE("shuffled timestamps name the offending line") {
    put(tmp.file("imu.csv"),
        "10000,0,0,0,0,0,0\n5000,0,0,0,0,0,0\n");
    try {
      read_imu_csv(tmp.file("imu.csv"));
      FAIL("expected NonMonotoneTime");
    } catch (const NonMonotoneTime& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("truncated row names the line") {
    put(tmp.file("imu.csv"), "5000,0,0,0,0,0,1\n10000,0,0,0\n");
    try {
      read_imu_csv(tmp.file("imu.csv"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("round trip is bit exact") {
    Rng rng(71);
    std::vector<ImuSample> samples;
    for (int k = 0; k < 200; ++k) {
      ImuSample s;
      s.t_ns = 5'000'000LL * (k + 1);
      s.omega_m = rng.vec3(2.0);
      s.accel_m = rng.vec3(10.0);
      samples.push_back(s);
    }
    write_imu_csv(tmp.file("imu.csv"), samples);
    const auto back = read_imu_csv(tmp.file("imu.csv"));
    REQUIRE(back.size() == samples.size());
    for (size_t k = 0; k < samples.size(); ++k) {
      CHECK(back[k].t_ns == samples[k].t_ns);
      CHECK((back[k].omega_m - samples[k].omega_m).norm() == 0.0);
      CHECK((back[k].accel_m - samples[k].accel_m).norm() == 0.0);
    }
    // and the writer is deterministic
    write_imu_csv(tmp.file("imu_b.csv"), samples);
    CHECK(slurp(tmp.file("imu.csv")) == slurp(tmp.file("imu_b.csv")));
  }
}

TEST_CASE("state csv") {
  TempDir tmp;
  Rng rng(72);
  SUBCASE("round trip is bit exact") {
    std::vector<StateRow> rows;
    for (int k = 0; k < 100; ++k) {
      StateRow row;
      row.t_ns = 1'000'000LL * k;
      row.x = rng.nav_state();
      rows.push_back(row);
    }
    write_state_csv(tmp.file("truth.csv"), rows);
    const auto back = read_state_csv(tmp.file("truth.csv"));
    REQUIRE(back.size() == rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
      CHECK(back[k].t_ns == rows[k].t_ns);
      CHECK((back[k].x.q.coeffs() - rows[k].x.q.coeffs()).norm() == 0.0);
      CHECK((back[k].x.p - rows[k].x.p).norm() == 0.0);
      CHECK((back[k].x.v - rows[k].x.v).norm() == 0.0);
      CHECK((back[k].x.b_w - rows[k].x.b_w).norm() == 0.0);
      CHECK((back[k].x.b_a - rows[k].x.b_a).norm() == 0.0);
    }
  }
  SUBCASE("non-unit quaternion rows are rejected") {
    put(tmp.file("bad.csv"),
        "0,0,0,0,0.9,0,0,0.1,0,0,0,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(read_state_csv(tmp.file("bad.csv")), ParseError);
  }
}

TEST_CASE("feature files") {
  TempDir tmp;
  SUBCASE("grouping by timestamp") {
    put(tmp.file("map.csv"), "1,0,0,0\n2,1,1,1\n3,2,0,1\n");
    put(tmp.file("obs.csv"),
        "1000,1,0.1,0.2,0.3\n1000,2,0.4,0.5,0.6\n2000,3,0.7,0.8,0.9\n");
    const auto [map, frames] =
        read_feature_frames(tmp.file("map.csv"), tmp.file("obs.csv"));
    CHECK(map.features.size() == 3);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].size() == 2);
    CHECK(frames[1].size() == 1);
    CHECK((frames[0].f_w[1] - Vec3(1, 1, 1)).norm() == 0.0);
    CHECK((frames[0].f_b[0] - Vec3(0.1, 0.2, 0.3)).norm() == 0.0);
  }
  SUBCASE("unknown id is rejected") {
    put(tmp.file("map.csv"), "1,0,0,0\n");
    put(tmp.file("obs.csv"), "1000,7,0.1,0.2,0.3\n");
    CHECK_THROWS_AS(
        read_feature_frames(tmp.file("map.csv"), tmp.file("obs.csv")),
        UnknownFeatureId);
  }
  SUBCASE("revisiting an old timestamp is rejected") {
    put(tmp.file("map.csv"), "1,0,0,0\n");
    put(tmp.file("obs.csv"),
        "2000,1,0,0,0\n1000,1,0,0,0\n");
    CHECK_THROWS_AS(
        read_feature_frames(tmp.file("map.csv"), tmp.file("obs.csv")),
        NonMonotoneTime);
  }
  SUBCASE("write-read round trip") {
    Rng rng(73);
    WorldMap world;
    for (int i = 0; i < 20; ++i) world.features.push_back({i, rng.vec3(5.0)});
    std::vector<FeatureFrame> frames;
    for (int k = 1; k <= 5; ++k) {
      FeatureFrame f;
      f.t_ns = 50'000'000LL * k;
      for (int i = 0; i < 4; ++i) {
        f.ids.push_back(i * 3);
        f.f_w.push_back(world.features[i * 3].pos);
        f.f_b.push_back(rng.vec3(3.0));
      }
      frames.push_back(f);
    }
    write_feature_map(tmp.file("map.csv"), world);
    write_feature_obs(tmp.file("obs.csv"), frames);
    const auto [map_back, frames_back] =
        read_feature_frames(tmp.file("map.csv"), tmp.file("obs.csv"));
    REQUIRE(frames_back.size() == frames.size());
    for (size_t k = 0; k < frames.size(); ++k) {
      CHECK(frames_back[k].t_ns == frames[k].t_ns);
      REQUIRE(frames_back[k].size() == frames[k].size());
      for (size_t i = 0; i < frames[k].size(); ++i) {
        CHECK(frames_back[k].ids[i] == frames[k].ids[i]);
        CHECK((frames_back[k].f_b[i] - frames[k].f_b[i]).norm() == 0.0);
        CHECK((frames_back[k].f_w[i] - frames[k].f_w[i]).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("metrics") {
  Rng rng(74);
  SUBCASE("perfect estimates give zero error") {
    std::vector<StateRow> truth;
    for (int k = 0; k < 50; ++k) {
      truth.push_back({1'000'000LL * k, rng.nav_state()});
    }
    const Metrics m = compute_metrics(truth, truth);
    CHECK(m.rmse == 0.0);
    CHECK(m.ssrmse == 0.0);
    CHECK(m.steps == 50);
  }
  SUBCASE("constant error is its own rmse") {
    std::vector<StateRow> truth, est;
    for (int k = 0; k < 10; ++k) {
      StateRow t;
      t.t_ns = 1'000'000LL * k;
      truth.push_back(t);
      StateRow e = t;
      e.x.p = Vec3(-0.75, 0, 0);  // p_e = +0.75
      est.push_back(e);
    }
    const Metrics m = compute_metrics(est, truth);
    CHECK(m.rmse == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.ssrmse == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("hand-computed two-step rmse") {
    std::vector<StateRow> truth(2), est(2);
    truth[0].t_ns = 0;
    truth[1].t_ns = 1'000'000;
    est = truth;
    est[0].x.p = Vec3(3, 0, 0);
    est[1].x.p = Vec3(0, -4, 0);
    const Metrics m = compute_metrics(est, truth);
    CHECK(m.rmse == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  }
  SUBCASE("ssrmse uses only the last 20 seconds") {
    std::vector<StateRow> truth, est;
    const std::int64_t step = 1'000'000'000;  // 1 s
    for (int k = 0; k <= 30; ++k) {
      StateRow t;
      t.t_ns = step * k;
      truth.push_back(t);
      StateRow e = t;
      if (k < 10) e.x.p = Vec3(5, 0, 0);  // early error, outside the window
      est.push_back(e);
    }
    const Metrics m = compute_metrics(est, truth);
    CHECK(m.ssrmse == 0.0);
    CHECK(m.rmse > 0.0);
    CHECK_FALSE(m.ssrmse_window_truncated);

    // prepending perfect steps outside the window leaves ssrmse unchanged
    std::vector<StateRow> truth2, est2;
    for (int k = -5; k < 0; ++k) {
      StateRow t;
      t.t_ns = step * k;
      truth2.push_back(t);
      est2.push_back(t);
    }
    truth2.insert(truth2.end(), truth.begin(), truth.end());
    est2.insert(est2.end(), est.begin(), est.end());
    CHECK(compute_metrics(est2, truth2).ssrmse == m.ssrmse);
  }
  SUBCASE("short runs flag the truncated window") {
    std::vector<StateRow> rows(3);
    rows[0].t_ns = 0;
    rows[1].t_ns = 1'000'000'000;
    rows[2].t_ns = 2'000'000'000;
    const Metrics m = compute_metrics(rows, rows);
    CHECK(m.ssrmse_window_truncated);
  }
  SUBCASE("attitude error follows the quaternion difference") {
    std::vector<StateRow> truth(1), est(1);
    truth[0].x.q = UnitQuaternion(0, 1, 0, 0);
    const Metrics m = compute_metrics(est, truth);
    CHECK(m.rows[0].r_e.norm() == doctest::Approx(M_PI));
    CHECK(m.rmse == doctest::Approx(M_PI));
  }
  SUBCASE("misaligned series are rejected") {
    std::vector<StateRow> a(3), b(3);
    for (int k = 0; k < 3; ++k) {
      a[k].t_ns = k;
      b[k].t_ns = k;
    }
    b[2].t_ns = 99;
    CHECK_THROWS_AS(compute_metrics(a, b), MisalignedSeries);
    b.pop_back();
    CHECK_THROWS_AS(compute_metrics(a, b), MisalignedSeries);
    CHECK_THROWS_AS(compute_metrics({}, {}), MisalignedSeries);
  }
}

TEST_CASE("json outputs") {
  TempDir tmp;
  Metrics m;
  m.rmse = 0.125;
  m.ssrmse = 0.03125;
  m.steps = 42;
  write_metrics_json(tmp.file("metrics.json"), m);
  const std::string a = slurp(tmp.file("metrics.json"));
  CHECK(a.find("\"rmse\": 0.125") != std::string::npos);
  CHECK(a.find("runtime") == std::string::npos);  // deterministic file
  write_metrics_json(tmp.file("metrics2.json"), m);
  CHECK(a == slurp(tmp.file("metrics2.json")));

  write_summary_json(tmp.file("summary.json"), m, 123.5);
  CHECK(slurp(tmp.file("summary.json")).find("runtime_ms") !=
        std::string::npos);

  DatasetMeta meta;
  meta.imu_rate = 200.0;
  meta.cam_rate = 20.0;
  meta.duration = 10.0;
  meta.seed = 77;
  meta.frames_note = "test";
  write_meta_json(tmp.file("meta.json"), meta);
  const DatasetMeta back = read_meta_json(tmp.file("meta.json"));
  CHECK(back.imu_rate == 200.0);
  CHECK(back.cam_rate == 20.0);
  CHECK(back.seed == 77);
  CHECK(back.frames_note == "test");
}

TEST_CASE("diagnostics round trip") {
  TempDir tmp;
  std::vector<StepDiagnostics> diag(3);
  diag[0].t_ns = 1000;
  diag[1].t_ns = 2000;
  diag[1].updated = true;
  diag[1].innovation_norm = 0.5;
  diag[1].cond_estimate = 12.0;
  diag[2].t_ns = 3000;
  diag[2].trace_p = 1.5;
  write_diagnostics_csv(tmp.file("diag.csv"), diag);
  const auto back = read_diagnostics_csv(tmp.file("diag.csv"));
  REQUIRE(back.size() == 3);
  CHECK(back[1].updated);
  CHECK_FALSE(back[0].updated);
  CHECK(back[1].innovation_norm == 0.5);
  CHECK(back[2].trace_p == 1.5);
}

TEST_CASE("run config") {
  TempDir tmp;
  SUBCASE("full parse") {
    put(tmp.file("run.cfg"),
        "# benchmark configuration\n"
        "c_gyro_diag = 1e-6 2e-6 3e-6\n"
        "c_accel_diag = 1e-4 1e-4 1e-4\n"
        "c_gyro_bias_diag = 1e-10 1e-10 1e-10\n"
        "c_accel_bias_diag = 1e-9 1e-9 1e-9\n"
        "c_f = 0.099538\n"
        "gravity = 0 0 -9.80665\n"
        "ut_lambda = -18\n"
        "ut_alpha = 1e-4\n"
        "ut_beta = 2\n"
        "init_mode = truth\n"
        "init_att_offset = 0.1 0.2 0.3\n"
        "init_pos_offset = 1 0 0\n"
        "p0_diag = 0.25 0.25 0.25 1 1 1 0.1 0.1 0.1 1e-3 1e-3 1e-3 1e-2 "
        "1e-2 1e-2\n"
        "eigenvalue_floor = off\n"
        "scale_bias_walk_with_dt = false\n");
    const RunConfig cfg = read_run_config(tmp.file("run.cfg"));
    CHECK(cfg.noise.c_gyro(1, 1) == 2e-6);
    CHECK(cfg.noise.c_f == 0.099538);
    CHECK(cfg.ut_lambda == -18.0);
    CHECK(cfg.init_mode == InitMode::kTruth);
    CHECK((cfg.init_att_offset - Vec3(0.1, 0.2, 0.3)).norm() == 0.0);
    CHECK(cfg.p0_diag(0) == 0.25);
    CHECK(cfg.p0_diag(14) == 1e-2);
    CHECK_FALSE(cfg.eigenvalue_floor);
    CHECK(cfg.ut_params().dof == 21);
  }
  SUBCASE("unknown keys are rejected") {
    put(tmp.file("run.cfg"), "c_f = 0.1\nnot_a_key = 3\n");
    CHECK_THROWS_AS(read_run_config(tmp.file("run.cfg")), ParseError);
  }
  SUBCASE("malformed values are rejected") {
    put(tmp.file("run.cfg"), "c_f = banana\n");
    CHECK_THROWS_AS(read_run_config(tmp.file("run.cfg")), ParseError);
    put(tmp.file("run2.cfg"), "gravity = 1 2\n");
    CHECK_THROWS_AS(read_run_config(tmp.file("run2.cfg")), ParseError);
    put(tmp.file("run3.cfg"), "c_f = 0.1\nc_f = 0.2\n");
    CHECK_THROWS_AS(read_run_config(tmp.file("run3.cfg")), ParseError);
    put(tmp.file("run4.cfg"), "init_q = 1 0 0\n");
    CHECK_THROWS_AS(read_run_config(tmp.file("run4.cfg")), ParseError);
  }
  SUBCASE("sim scenario parse") {
    put(tmp.file("sim.cfg"),
        "kind = circle\n"
        "amplitude = 2 2 0\n"
        "angular_rate = 0.5\n"
        "yaw_rate = 0.3\n"
        "duration = 60\n"
        "imu_rate = 200\n"
        "cam_rate = 20\n"
        "seed = 11\n"
        "c_f = 0.099538\n"
        "b0_gyro = 0.01 -0.02 0.015\n");
    const SimScenario sc = read_sim_scenario(tmp.file("sim.cfg"));
    CHECK(sc.traj.kind == TrajectoryKind::kCircle);
    CHECK(sc.traj.duration == 60.0);
    CHECK(sc.traj.seed == 11);
    CHECK(sc.noise.c_f == 0.099538);
    CHECK((sc.b0_gyro - Vec3(0.01, -0.02, 0.015)).norm() == 0.0);
    CHECK(sc.world_features == 60);

    put(tmp.file("sim_bad.cfg"), "kind = figure8\n");
    CHECK_THROWS_AS(read_sim_scenario(tmp.file("sim_bad.cfg")), ParseError);
  }
}

TEST_CASE("shortest round-trip serialization is lossless") {
  TempDir tmp;
  Rng rng(75);
  std::vector<StateRow> rows;
  for (int k = 0; k < 64; ++k) {
    StateRow row;
    row.t_ns = k;
    row.x = rng.nav_state();
    // stress the formatter with extreme magnitudes
    row.x.p = Vec3(rng.normal(1e-30), rng.normal(1e30), rng.normal());
    rows.push_back(row);
  }
  write_state_csv(tmp.file("s.csv"), rows);
  const auto back = read_state_csv(tmp.file("s.csv"));
  for (size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].x.p(0) == rows[k].x.p(0));
    CHECK(back[k].x.p(1) == rows[k].x.p(1));
    CHECK(back[k].x.p(2) == rows[k].x.p(2));
  }
}
