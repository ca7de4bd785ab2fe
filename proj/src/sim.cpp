#include "navkf/sim.hpp"

#include <algorithm>
#include <cmath>

#include "navkf/unscented.hpp"

namespace navkf {

namespace {

// Noise stream identifiers; each stream sees an independent counter space.
enum Stream : std::uint64_t {
  kGyroWhite = 0,
  kAccelWhite = 1,
  kGyroWalk = 2,
  kAccelWalk = 3,
  kFeatureNoise = 4,
  kWorldLayout = 5,
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index, std::uint32_t lane) {
  std::uint64_t h = splitmix(seed ^ 0xD1B54A32D192ED03ull);
  h = splitmix(h ^ (stream * 0x9E3779B97F4A7C15ull));
  h = splitmix(h ^ (index * 0xBF58476D1CE4E5B9ull));
  h = splitmix(h ^ (static_cast<std::uint64_t>(lane) + 1));
  return h;
}

double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::int64_t seconds_to_ns(double s) {
  return static_cast<std::int64_t>(std::llround(s * 1e9));
}

int camera_step(const TrajectorySpec& spec) {
  const double ratio = spec.imu_rate / spec.cam_rate;
  const int step = static_cast<int>(std::llround(ratio));
  if (step < 1 || std::abs(ratio - step) > 1e-9) {
    throw Error("trajectory spec: imu_rate must be a multiple of cam_rate");
  }
  return step;
}

Vec3 analytic_position(const TrajectorySpec& spec, double t) {
  const Vec3& a = spec.amplitude;
  const double w = spec.angular_rate;
  switch (spec.kind) {
    case TrajectoryKind::kHover:
      return a;
    case TrajectoryKind::kCircle:
      return Vec3(a.x() * std::cos(w * t), a.y() * std::sin(w * t), a.z());
    case TrajectoryKind::kLissajous:
      return Vec3(a.x() * std::sin(w * t), a.y() * std::sin(2.0 * w * t),
                  a.z() * std::sin(3.0 * w * t));
  }
  throw Error("unknown trajectory kind");
}

Vec3 analytic_velocity(const TrajectorySpec& spec, double t) {
  const Vec3& a = spec.amplitude;
  const double w = spec.angular_rate;
  switch (spec.kind) {
    case TrajectoryKind::kHover:
      return Vec3::Zero();
    case TrajectoryKind::kCircle:
      return Vec3(-a.x() * w * std::sin(w * t), a.y() * w * std::cos(w * t),
                  0.0);
    case TrajectoryKind::kLissajous:
      return Vec3(a.x() * w * std::cos(w * t),
                  a.y() * 2.0 * w * std::cos(2.0 * w * t),
                  a.z() * 3.0 * w * std::cos(3.0 * w * t));
  }
  throw Error("unknown trajectory kind");
}

UnitQuaternion analytic_attitude(const TrajectorySpec& spec, double t) {
  if (spec.kind == TrajectoryKind::kHover) return UnitQuaternion::identity();
  return rotvec_to_quat(Vec3(0.0, 0.0, spec.yaw_rate * t));
}

}  // namespace

double CounterRng::uniform(std::uint64_t index, std::uint32_t lane) const {
  return to_unit(mix_key(seed_, stream_, index, lane));
}

double CounterRng::normal(std::uint64_t index, std::uint32_t lane) const {
  const std::uint64_t k = mix_key(seed_, stream_, index, lane);
  double u1 = to_unit(k);
  const double u2 = to_unit(splitmix(k ^ 0xA0761D6478BD642Full));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 CounterRng::normal3(std::uint64_t index) const {
  return Vec3(normal(index, 0), normal(index, 1), normal(index, 2));
}

std::vector<TruthSample> generate_truth(const TrajectorySpec& spec,
                                        const Vec3& gravity) {
  if (!(spec.duration > 0.0) || !(spec.imu_rate > 0.0)) {
    throw Error("trajectory spec: duration and imu_rate must be positive");
  }
  camera_step(spec);  // validates the rate ratio
  const int n = static_cast<int>(std::llround(spec.duration * spec.imu_rate));
  const double dt = 1.0 / spec.imu_rate;

  std::vector<TruthSample> truth(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    truth[k].t_ns = seconds_to_ns(t);
    truth[k].x.q = analytic_attitude(spec, t);
    truth[k].x.p = analytic_position(spec, t);
  }
  truth[0].x.v = analytic_velocity(spec, 0.0);

  // Derive the interval inputs so that one discrete transition step with
  // sample k's (omega, accel) maps state k exactly onto state k+1:
  //   omega_k = log(q_k^-1 q_{k+1}) / dT
  //   w_k     = 2 (p_{k+1} - p_k - v_k dT) / dT^2,  v_{k+1} = v_k + w_k dT
  //   a_k     = R(q_k)^T (w_k - g)
  for (int k = 0; k < n; ++k) {
    const NavState& cur = truth[k].x;
    const NavState& next = truth[k + 1].x;
    truth[k].omega = quat_to_rotvec(qmul(qinv(cur.q), next.q)) / dt;
    const Vec3 w = 2.0 * (next.p - cur.p - cur.v * dt) / (dt * dt);
    truth[k + 1].x.v = cur.v + w * dt;
    truth[k].accel = quat_to_rot(cur.q).transpose() * (w - gravity);
  }
  if (n > 0) {
    truth[n].omega = truth[n - 1].omega;
    truth[n].accel = truth[n - 1].accel;
  }
  return truth;
}

std::pair<std::vector<ImuSample>, std::vector<BiasSample>> synthesize_imu(
    const std::vector<TruthSample>& truth, const NoiseConfig& cfg,
    std::uint64_t seed, const Vec3& b0_gyro, const Vec3& b0_accel) {
  if (truth.size() < 2) {
    throw Error("synthesize_imu: need at least two truth samples");
  }
  const CounterRng gyro_white(seed, kGyroWhite);
  const CounterRng accel_white(seed, kAccelWhite);
  const CounterRng gyro_walk(seed, kGyroWalk);
  const CounterRng accel_walk(seed, kAccelWalk);
  const MatX s_gyro = sqrt_psd(cfg.c_gyro);
  const MatX s_accel = sqrt_psd(cfg.c_accel);
  const MatX s_gyro_walk = sqrt_psd(cfg.c_gyro_bias);
  const MatX s_accel_walk = sqrt_psd(cfg.c_accel_bias);

  const auto n = truth.size() - 1;
  std::vector<BiasSample> bias(truth.size());
  bias[0] = BiasSample{truth[0].t_ns, b0_gyro, b0_accel};
  for (size_t k = 1; k < truth.size(); ++k) {
    bias[k].t_ns = truth[k].t_ns;
    bias[k].b_w = bias[k - 1].b_w + s_gyro_walk * gyro_walk.normal3(k);
    bias[k].b_a = bias[k - 1].b_a + s_accel_walk * accel_walk.normal3(k);
  }

  std::vector<ImuSample> imu(n);
  for (size_t k = 1; k <= n; ++k) {
    ImuSample& s = imu[k - 1];
    s.t_ns = truth[k].t_ns;
    s.omega_m = truth[k - 1].omega + bias[k].b_w + s_gyro * gyro_white.normal3(k);
    s.accel_m =
        truth[k - 1].accel + bias[k].b_a + s_accel * accel_white.normal3(k);
  }
  return {std::move(imu), std::move(bias)};
}

std::vector<FeatureFrame> synthesize_features(
    const std::vector<TruthSample>& truth, const WorldMap& map,
    const NoiseConfig& cfg, const TrajectorySpec& spec,
    const FeatureGenOptions& opt) {
  const int step = camera_step(spec);
  const CounterRng noise(spec.seed, kFeatureNoise);

  std::vector<FeatureFrame> frames;
  for (size_t k = step; k < truth.size(); k += step) {
    const NavState& x = truth[k].x;
    struct Candidate {
      double dist;
      const WorldFeature* f;
    };
    std::vector<Candidate> visible;
    for (const WorldFeature& f : map.features) {
      const double d = (f.pos - x.p).norm();
      if (d <= opt.visibility_radius) visible.push_back({d, &f});
    }
    if (static_cast<int>(visible.size()) < opt.min_per_frame) continue;
    std::sort(visible.begin(), visible.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.dist != b.dist ? a.dist < b.dist : a.f->id < b.f->id;
              });
    if (static_cast<int>(visible.size()) > opt.max_per_frame) {
      visible.resize(opt.max_per_frame);
    }
    std::sort(visible.begin(), visible.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.f->id < b.f->id;
              });

    FeatureFrame frame;
    frame.t_ns = truth[k].t_ns;
    const Mat3 rt = quat_to_rot(x.q).transpose();
    for (const Candidate& c : visible) {
      const std::uint64_t idx =
          (static_cast<std::uint64_t>(k) << 20) +
          static_cast<std::uint64_t>(c.f->id);
      frame.ids.push_back(c.f->id);
      frame.f_w.push_back(c.f->pos);
      frame.f_b.push_back(rt * (c.f->pos - x.p) + cfg.c_f * noise.normal3(idx));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

WorldMap default_world(std::uint64_t seed, int count, const Vec3& box) {
  const CounterRng layout(seed, kWorldLayout);
  WorldMap map;
  map.features.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec3 pos;
    for (int lane = 0; lane < 3; ++lane) {
      pos(lane) = (layout.uniform(i, lane) - 0.5) * box(lane);
    }
    map.features.push_back({i, pos});
  }
  return map;
}

}  // namespace navkf
