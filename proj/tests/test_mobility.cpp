#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "urllc/errors.hpp"
#include "urllc/mobility.hpp"

using namespace urllc;
using mobility::Trajectory;
using mobility::TrajectoryConfig;
using mobility::TrajectoryKind;
using mobility::Vec3;

namespace {

TrajectoryConfig const_velocity_cfg(std::int64_t duration) {
  TrajectoryConfig cfg;
  cfg.kind = TrajectoryKind::kConstAccel;
  cfg.duration_ms = duration;
  cfg.noise_std_m = 0.0;
  cfg.velocity_mps = {1.0, 0.0, 0.0};
  return cfg;
}

}  // namespace

TEST_CASE("const_accel trajectory is exact uniform motion") {
  const Trajectory t = mobility::gen_trajectory(const_velocity_cfg(1000), 3);
  for (std::int64_t k = 0; k < t.length(); ++k) {
    CHECK(t.positions[static_cast<std::size_t>(k)].x ==
          doctest::Approx(static_cast<double>(k) / 1000.0).epsilon(1e-12));
    CHECK(t.positions[static_cast<std::size_t>(k)].y == 0.0);
  }
}

TEST_CASE("same seed reproduces the trajectory bit-exactly") {
  TrajectoryConfig cfg;
  cfg.kind = TrajectoryKind::kSmoothRandom;
  cfg.duration_ms = 5000;
  const Trajectory a = mobility::gen_trajectory(cfg, 17);
  const Trajectory b = mobility::gen_trajectory(cfg, 17);
  REQUIRE(a.length() == b.length());
  for (std::int64_t k = 0; k < a.length(); ++k) {
    CHECK(a.positions[static_cast<std::size_t>(k)].x == b.positions[static_cast<std::size_t>(k)].x);
    CHECK(a.positions[static_cast<std::size_t>(k)].z == b.positions[static_cast<std::size_t>(k)].z);
  }
  TrajectoryConfig too_short;
  too_short.duration_ms = 50;
  CHECK_THROWS_AS(mobility::gen_trajectory(too_short, 1), ConfigError);
  TrajectoryConfig bad;
  bad.noise_std_m = -1.0;
  bad.duration_ms = 1000;
  CHECK_THROWS_AS(mobility::gen_trajectory(bad, 1), ConfigError);
}

TEST_CASE("smooth_random speed never exceeds v_max") {
  TrajectoryConfig cfg;
  cfg.kind = TrajectoryKind::kSmoothRandom;
  cfg.duration_ms = 1000000;
  cfg.noise_std_m = 0.0;  // inspect the kinematics directly
  const Trajectory t = mobility::gen_trajectory(cfg, 9);
  double max_speed = 0.0;
  for (std::int64_t k = 1; k < t.length(); ++k) {
    const Vec3 d = t.positions[static_cast<std::size_t>(k)] -
                   t.positions[static_cast<std::size_t>(k - 1)];
    max_speed = std::max(max_speed, d.norm() * 1000.0);
  }
  CHECK(max_speed <= cfg.v_max_mps + 1e-9);
  CHECK(max_speed > 0.01);  // it does move
}

TEST_CASE("newton_predict is exact on polynomial motion") {
  // Constant velocity.
  {
    const Trajectory t = mobility::gen_trajectory(const_velocity_cfg(200), 1);
    const std::span<const Vec3> hist(t.positions.data(), 50);
    const Vec3 pred = mobility::newton_predict(hist, 20);
    const Vec3 truth = t.positions[50 - 1 + 20];
    CHECK((pred - truth).norm() < 1e-9);
  }
  // Constant acceleration.
  {
    TrajectoryConfig cfg = const_velocity_cfg(200);
    cfg.accel_mps2 = {0.0, 3.0, -2.0};
    cfg.velocity_mps = {0.5, -1.0, 0.2};
    const Trajectory t = mobility::gen_trajectory(cfg, 1);
    const std::span<const Vec3> hist(t.positions.data() + 30, 50);
    const Vec3 pred = mobility::newton_predict(hist, 15);
    const Vec3 truth = t.positions[30 + 50 - 1 + 15];
    CHECK((pred - truth).norm() < 1e-9);
  }
}

TEST_CASE("newton_predict is translation equivariant") {
  TrajectoryConfig cfg;
  cfg.kind = TrajectoryKind::kSmoothRandom;
  cfg.duration_ms = 200;
  const Trajectory t = mobility::gen_trajectory(cfg, 5);
  std::vector<Vec3> hist(t.positions.begin(), t.positions.begin() + 50);
  const Vec3 base = mobility::newton_predict(hist, 10);
  const Vec3 shift{3.5, -1.25, 0.75};
  for (Vec3& p : hist) p = p + shift;
  const Vec3 moved = mobility::newton_predict(hist, 10);
  CHECK((moved - (base + shift)).norm() < 1e-9);
}

TEST_CASE("newton_predict on a sinusoid matches the independent LS oracle") {
  // One axis, period 100 ms, amplitude 5 cm: fit the quadratic by explicit
  // normal equations here and compare the extrapolations.
  const int history = 50;
  const int horizon = 20;
  std::vector<Vec3> hist(history);
  const double amp = 0.05, period = 100.0;
  for (int i = 0; i < history; ++i) {
    const double t_ms = static_cast<double>(i);
    hist[static_cast<std::size_t>(i)] = {
        amp * std::sin(2.0 * std::numbers::pi * t_ms / period), 0.0, 0.0};
  }

  // Oracle: solve (A^T A) c = A^T y for basis [1, t, t^2], t in ms.
  double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double aty[3] = {0, 0, 0};
  for (int i = 0; i < history; ++i) {
    const double t = static_cast<double>(i - (history - 1));
    const double row[3] = {1.0, t, t * t};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ata[r][c] += row[r] * row[c];
      aty[r] += row[r] * hist[static_cast<std::size_t>(i)].x;
    }
  }
  // Cramer's rule on the 3x3 system.
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d0 = det3(ata);
  double coef[3];
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int cc = 0; cc < 3; ++cc) m[r][cc] = ata[r][cc];
    }
    for (int r = 0; r < 3; ++r) m[r][c] = aty[r];
    coef[c] = det3(m) / d0;
  }
  const double h = static_cast<double>(horizon);
  const double oracle_pred = coef[0] + coef[1] * h + coef[2] * h * h;

  const Vec3 pred = mobility::newton_predict(hist, horizon);
  CHECK(std::fabs(pred.x - oracle_pred) < 1e-9);

  // And the resulting prediction error against the true sinusoid equals the
  // analytic remainder of the fitted quadratic.
  const double truth =
      amp * std::sin(2.0 * std::numbers::pi * (history - 1 + horizon) / period);
  CHECK(std::fabs((pred.x - truth) - (oracle_pred - truth)) < 1e-9);
}

TEST_CASE("error probability: exact predictor and infinite tolerance give zero") {
  TrajectoryConfig cfg = const_velocity_cfg(100100);
  cfg.accel_mps2 = {0.2, 0.0, -0.1};
  const Trajectory t = mobility::gen_trajectory(cfg, 2);
  const mobility::PredictionSpec spec{50, 20, 0.02};
  CHECK(mobility::eval_error_prob_newton(t, spec, 100000 - 70) == 0.0);

  TrajectoryConfig wild;
  wild.kind = TrajectoryKind::kSmoothRandom;
  wild.duration_ms = 100100;
  const Trajectory w = mobility::gen_trajectory(wild, 3);
  const mobility::PredictionSpec huge{50, 20, 1e6};
  CHECK(mobility::eval_error_prob_newton(w, huge, 100000 - 70) == 0.0);

  const mobility::PredictionSpec s2{50, 20, 0.02};
  const Trajectory tiny = mobility::gen_trajectory(const_velocity_cfg(500), 1);
  CHECK_THROWS_AS(mobility::eval_error_prob_newton(tiny, s2), InsufficientDataError);
}

TEST_CASE("error probability is non-decreasing in horizon and tolerance") {
  TrajectoryConfig cfg;
  cfg.kind = TrajectoryKind::kSmoothRandom;
  cfg.duration_ms = 150000;
  const Trajectory t = mobility::gen_trajectory(cfg, 11);
  const auto grid =
      mobility::newton_error_grid(t, 50, {5, 10, 20}, {0.002, 0.02}, 100000);
  // Horizon rows: non-decreasing for each accuracy column.
  for (std::size_t a = 0; a < 2; ++a) {
    CHECK(grid[0][a] <= grid[1][a]);
    CHECK(grid[1][a] <= grid[2][a]);
  }
  // Tighter accuracy means more misses.
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(grid[h][1] <= grid[h][0]);
  }
}

TEST_CASE("training memorizes identical pairs") {
  mobility::PredictorDataset ds;
  ds.history_len = 5;
  ds.horizon_len = 2;
  const std::vector<double> input(15, 0.3);
  const std::vector<double> target(6, -0.2);
  for (int i = 0; i < 8; ++i) {
    ds.inputs.push_back(input);
    ds.targets.push_back(target);
  }
  mobility::PredictorTrainConfig cfg;
  cfg.hidden = {16};
  cfg.epochs = 200;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.1;
  cfg.lr_decay = 1.0;
  cfg.seed = 4;
  mobility::TrainLog log;
  const nn::MlpParams net = mobility::train_mlp_predictor(ds, cfg, &log);
  REQUIRE(log.epoch_mse.size() == 200);
  CHECK(log.epoch_mse.back() < 1e-6);
  CHECK(mobility::dataset_mse(net, ds) < 1e-6);
}

TEST_CASE("mlp matches the newton predictor on constant-velocity data") {
  const Trajectory t = mobility::gen_trajectory(const_velocity_cfg(2000), 6);
  const auto ds = mobility::build_predictor_dataset(t, 50, 20, 64, 7);
  mobility::PredictorTrainConfig cfg;
  cfg.hidden = {24};
  cfg.epochs = 600;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.1;
  cfg.lr_decay = 0.997;
  cfg.seed = 8;
  const nn::MlpParams net = mobility::train_mlp_predictor(ds, cfg);

  // Newton is exact here, so its window MSE is zero; the trained net must
  // land within the stated slack (measured in meters^2).
  const double mlp_mse_scaled = mobility::dataset_mse(net, ds);
  const double mlp_mse_m2 =
      mlp_mse_scaled / (mobility::kFeatureScale * mobility::kFeatureScale);
  CHECK(mlp_mse_m2 < 1e-8);
}

TEST_CASE("trajectory csv round-trips") {
  const Trajectory t = mobility::gen_trajectory(const_velocity_cfg(150), 2);
  const std::string path = "test_traj_tmp.csv";
  mobility::write_trajectory_csv(t, path);
  const Trajectory back = mobility::read_trajectory_csv(path);
  REQUIRE(back.length() == t.length());
  for (std::int64_t k = 0; k < t.length(); ++k) {
    CHECK(back.positions[static_cast<std::size_t>(k)].x ==
          doctest::Approx(t.positions[static_cast<std::size_t>(k)].x).epsilon(1e-15));
  }
  std::remove(path.c_str());
}
