#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "urllc/nn.hpp"
#include "urllc/rng.hpp"

namespace urllc::mobility {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const;
};

// Positions sampled on a uniform 1 ms grid.
struct Trajectory {
  std::vector<Vec3> positions;
  std::int64_t length() const { return static_cast<std::int64_t>(positions.size()); }
};

enum class TrajectoryKind { kConstAccel, kSmoothRandom, kSinusoid };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::kSmoothRandom;
  std::int64_t duration_ms = 100000;
  double noise_std_m = 0.0005;  // measurement noise on every recorded point

  // const_accel
  Vec3 start;
  Vec3 velocity_mps;
  Vec3 accel_mps2;

  // smooth_random: regime-switching Gauss-Markov acceleration. Calm motion
  // with occasional high-jerk bursts, which is what puts the model-based
  // predictor's tail errors on a measurable scale at every horizon.
  double accel_std_mps2 = 1.0;
  double accel_tau_ms = 10.0;
  double burst_scale = 50.0;
  double burst_start_prob = 0.002;   // per slot
  double burst_stop_prob = 0.08;     // per slot (mean burst ~12 ms)
  double v_max_mps = 1.5;
  double jerk_max_mps3 = 20000.0;

  // sinusoid (per axis)
  Vec3 amplitude_m = {0.05, 0.05, 0.05};
  Vec3 period_ms = {100.0, 130.0, 170.0};
  Vec3 phase_rad = {0.0, 1.0, 2.0};
};

Trajectory gen_trajectory(const TrajectoryConfig& cfg, std::uint64_t seed);

struct PredictionSpec {
  int history_ms = 50;
  int horizon_ms = 20;     // {5, 10, 20} in the experiments
  double accuracy_m = 0.02;
};

// Least-squares quadratic fit over the history window, extrapolated
// horizon_ms ahead. The fit-and-extrapolate composite is a fixed linear
// functional of the window, precomputed once per (history, horizon).
class NewtonExtrapolator {
 public:
  NewtonExtrapolator(int history_len, int horizon_ms);
  Vec3 predict(std::span<const Vec3> history) const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  int history_len_;
  std::vector<double> weights_;
};

Vec3 newton_predict(std::span<const Vec3> history, int horizon_ms);

// Training data for the MLP predictor: inputs are the 50 history points
// relative to the window's last point, targets the next `horizon_len`
// points in the same frame; both scaled by kFeatureScale.
inline constexpr double kFeatureScale = 20.0;

struct PredictorDataset {
  int history_len = 50;
  int horizon_len = 20;
  std::vector<std::vector<double>> inputs;   // history_len * 3
  std::vector<std::vector<double>> targets;  // horizon_len * 3
};

PredictorDataset build_predictor_dataset(const Trajectory& traj, int history_len,
                                         int horizon_len, int n_samples,
                                         std::uint64_t seed);

struct PredictorTrainConfig {
  int epochs = 120;
  int batch_size = 50;
  double learning_rate = 0.02;
  double momentum = 0.9;
  double lr_decay = 0.985;  // per epoch
  std::uint64_t seed = 1;
  std::vector<int> hidden = {100, 100};
};

struct TrainLog {
  std::vector<double> epoch_mse;
};

nn::MlpParams train_mlp_predictor(const PredictorDataset& dataset,
                                  const PredictorTrainConfig& cfg,
                                  TrainLog* log = nullptr);

double dataset_mse(const nn::MlpParams& net, const PredictorDataset& dataset);

// Forward the trained net on one window; returns predictions for horizons
// 1..horizon_len in absolute coordinates.
std::vector<Vec3> mlp_predict_window(const nn::MlpParams& net,
                                     std::span<const Vec3> history, int horizon_len);

// Sliding-window error probability: fraction of windows whose prediction
// misses the recorded position at `horizon_ms` by more than `accuracy_m`.
// Requires at least `min_windows` evaluable windows.
inline constexpr std::int64_t kDefaultMinWindows = 100000;

double eval_error_prob_newton(const Trajectory& traj, const PredictionSpec& spec,
                              std::int64_t min_windows = kDefaultMinWindows);
double eval_error_prob_mlp(const nn::MlpParams& net, const Trajectory& traj,
                           const PredictionSpec& spec,
                           std::int64_t min_windows = kDefaultMinWindows);

// One sweep over the trajectory computing error probabilities for every
// (horizon, accuracy) pair; the MLP grid costs a single forward per window.
std::vector<std::vector<double>> newton_error_grid(
    const Trajectory& traj, int history_len, const std::vector<int>& horizons,
    const std::vector<double>& accuracies, std::int64_t min_windows = kDefaultMinWindows);
std::vector<std::vector<double>> mlp_error_grid(
    const nn::MlpParams& net, const Trajectory& traj, int history_len,
    const std::vector<int>& horizons, const std::vector<double>& accuracies,
    std::int64_t min_windows = kDefaultMinWindows);

// CSV with columns t_ms,x,y,z.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace urllc::mobility
