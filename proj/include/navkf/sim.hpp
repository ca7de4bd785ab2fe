#pragma once

#include <cstdint>
#include <vector>

#include "navkf/nav_model.hpp"

namespace navkf {

enum class TrajectoryKind { kHover, kCircle, kLissajous };

/// Analytic trajectory description.
///   hover:     p = amplitude, no rotation
///   circle:    p = (Ax cos(w t), Ay sin(w t), Az), yaw = yaw_rate * t
///   lissajous: p = (Ax sin(w t), Ay sin(2 w t), Az sin(3 w t)),
///              yaw = yaw_rate * t
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kCircle;
  Vec3 amplitude = Vec3(2.0, 2.0, 0.0);  // m
  double angular_rate = 0.5;             // rad/s, trajectory frequency
  double yaw_rate = 0.3;                 // rad/s
  double duration = 10.0;                // s
  double imu_rate = 200.0;               // Hz
  double cam_rate = 20.0;                // Hz
  std::uint64_t seed = 1;
};

struct WorldFeature {
  std::int64_t id = 0;
  Vec3 pos = Vec3::Zero();  // world frame, m
};

struct WorldMap {
  std::vector<WorldFeature> features;
};

struct FeatureGenOptions {
  double visibility_radius = 8.0;  // m
  int max_per_frame = 30;
  int min_per_frame = 3;
};

/// Ground-truth sample at t_ns, with the body rate and specific acceleration
/// that drive the discrete transition over [t, t + dT].
struct TruthSample {
  std::int64_t t_ns = 0;
  NavState x;   // biases zero; the synthesized walk is reported separately
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

struct BiasSample {
  std::int64_t t_ns = 0;
  Vec3 b_w = Vec3::Zero();
  Vec3 b_a = Vec3::Zero();
};

/// Stateless counter-based Gaussian/uniform source: the value at
/// (seed, stream, index, lane) is a pure function, so independent streams
/// stay independent regardless of evaluation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  double uniform(std::uint64_t index, std::uint32_t lane) const;  // [0, 1)
  double normal(std::uint64_t index, std::uint32_t lane) const;
  Vec3 normal3(std::uint64_t index) const;  // lanes 0..2

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Ground truth sampled at the IMU rate: duration * imu_rate intervals, one
/// extra sample at the end, so index k holds the state at t_k and the inputs
/// over [t_k, t_{k+1}). Attitude and position are analytic; velocity and
/// specific acceleration are constructed so that one state_transition step
/// with sample k's inputs lands exactly on sample k+1.
std::vector<TruthSample> generate_truth(const TrajectorySpec& spec,
                                        const Vec3& gravity);

/// Noisy IMU stream: row k (k = 1..N) is stamped t_k and carries the inputs
/// for the step ending at t_k, corrupted by the bias walk and white noise
/// from cfg. Returns the bias truth alongside. Deterministic in (spec.seed).
std::pair<std::vector<ImuSample>, std::vector<BiasSample>> synthesize_imu(
    const std::vector<TruthSample>& truth, const NoiseConfig& cfg,
    std::uint64_t seed, const Vec3& b0_gyro = Vec3::Zero(),
    const Vec3& b0_accel = Vec3::Zero());

/// Feature frames at the camera epochs (every imu_rate/cam_rate-th sample):
/// features within visibility_radius of the true position, nearest first up
/// to max_per_frame, observed with per-axis noise std cfg.c_f. Frames with
/// fewer than min_per_frame visible features are suppressed.
std::vector<FeatureFrame> synthesize_features(
    const std::vector<TruthSample>& truth, const WorldMap& map,
    const NoiseConfig& cfg, const TrajectorySpec& spec,
    const FeatureGenOptions& opt = {});

/// Uniformly scattered features in an axis-aligned box centered at the
/// origin. Deterministic in (seed).
WorldMap default_world(std::uint64_t seed, int count = 60,
                       const Vec3& box = Vec3(10.0, 10.0, 4.0));

}  // namespace navkf
