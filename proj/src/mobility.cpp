#include "urllc/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "urllc/errors.hpp"

namespace urllc::mobility {

namespace {

constexpr double kSlotSeconds = 1e-3;

// Solve the 3x3 normal equations by Gaussian elimination with partial
// pivoting; the systems here are tiny and well conditioned in seconds.
void solve3(double a[3][3], double b[3], double x[3]) {
  int idx[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(a[idx[r]][col]) > std::fabs(a[idx[piv]][col])) piv = r;
    }
    std::swap(idx[col], idx[piv]);
    const double d = a[idx[col]][col];
    if (d == 0.0) throw NumericalError("newton fit: singular normal equations");
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[idx[r]][col] / d;
      for (int c = col; c < 3; ++c) a[idx[r]][c] -= f * a[idx[col]][c];
      b[idx[r]] -= f * b[idx[col]];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double acc = b[idx[row]];
    for (int c = row + 1; c < 3; ++c) acc -= a[idx[row]][c] * x[c];
    x[row] = acc / a[idx[row]][row];
  }
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Trajectory gen_trajectory(const TrajectoryConfig& cfg, std::uint64_t seed) {
  if (cfg.duration_ms < 100) {
    throw ConfigError("gen_trajectory: duration must be >= 100 ms");
  }
  if (cfg.noise_std_m < 0.0) {
    throw ConfigError("gen_trajectory: noise_std must be non-negative");
  }

  Trajectory traj;
  traj.positions.resize(static_cast<std::size_t>(cfg.duration_ms));
  RngStream rng = RngStream(seed).child(0x747261ULL);  // trajectory stream
  RngStream noise_rng = RngStream(seed).child(0x6e6f69ULL);

  switch (cfg.kind) {
    case TrajectoryKind::kConstAccel: {
      for (std::int64_t k = 0; k < cfg.duration_ms; ++k) {
        const double t = static_cast<double>(k) * kSlotSeconds;
        traj.positions[static_cast<std::size_t>(k)] =
            cfg.start + cfg.velocity_mps * t + cfg.accel_mps2 * (0.5 * t * t);
      }
      break;
    }
    case TrajectoryKind::kSinusoid: {
      const double tau = 2.0 * std::numbers::pi;
      for (std::int64_t k = 0; k < cfg.duration_ms; ++k) {
        const double t = static_cast<double>(k);
        traj.positions[static_cast<std::size_t>(k)] = {
            cfg.start.x + cfg.amplitude_m.x * std::sin(tau * t / cfg.period_ms.x + cfg.phase_rad.x),
            cfg.start.y + cfg.amplitude_m.y * std::sin(tau * t / cfg.period_ms.y + cfg.phase_rad.y),
            cfg.start.z + cfg.amplitude_m.z * std::sin(tau * t / cfg.period_ms.z + cfg.phase_rad.z)};
      }
      break;
    }
    case TrajectoryKind::kSmoothRandom: {
      Vec3 pos = cfg.start;
      Vec3 vel;
      Vec3 acc;
      bool burst = false;
      const double rho = std::exp(-1.0 / cfg.accel_tau_ms);
      const double drive = std::sqrt(1.0 - rho * rho);
      const double max_step = cfg.jerk_max_mps3 * kSlotSeconds;
      for (std::int64_t k = 0; k < cfg.duration_ms; ++k) {
        if (burst) {
          if (rng.uniform01() < cfg.burst_stop_prob) burst = false;
        } else {
          if (rng.uniform01() < cfg.burst_start_prob) burst = true;
        }
        const double sigma = cfg.accel_std_mps2 * (burst ? cfg.burst_scale : 1.0);
        Vec3 target{rho * acc.x + drive * sigma * rng.gaussian(),
                    rho * acc.y + drive * sigma * rng.gaussian(),
                    rho * acc.z + drive * sigma * rng.gaussian()};
        // Jerk bound: clamp per-slot acceleration changes.
        acc.x += std::clamp(target.x - acc.x, -max_step, max_step);
        acc.y += std::clamp(target.y - acc.y, -max_step, max_step);
        acc.z += std::clamp(target.z - acc.z, -max_step, max_step);

        vel = vel + acc * kSlotSeconds;
        const double speed = vel.norm();
        if (speed > cfg.v_max_mps) vel = vel * (cfg.v_max_mps / speed);
        pos = pos + vel * kSlotSeconds;
        traj.positions[static_cast<std::size_t>(k)] = pos;
      }
      break;
    }
  }

  if (cfg.noise_std_m > 0.0) {
    for (Vec3& p : traj.positions) {
      p.x += noise_rng.gaussian(0.0, cfg.noise_std_m);
      p.y += noise_rng.gaussian(0.0, cfg.noise_std_m);
      p.z += noise_rng.gaussian(0.0, cfg.noise_std_m);
    }
  }
  return traj;
}

NewtonExtrapolator::NewtonExtrapolator(int history_len, int horizon_ms)
    : history_len_(history_len) {
  if (history_len < 3) throw ConfigError("newton fit needs >= 3 history points");
  // Basis [1, t, t^2] with t in seconds, t = 0 at the newest point.
  // weights = phi(h)^T (A^T A)^{-1} A^T, one weight per history sample.
  double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  std::vector<double> ts(static_cast<std::size_t>(history_len));
  for (int i = 0; i < history_len; ++i) {
    const double t = static_cast<double>(i - (history_len - 1)) * kSlotSeconds;
    ts[static_cast<std::size_t>(i)] = t;
    const double row[3] = {1.0, t, t * t};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ata[r][c] += row[r] * row[c];
    }
  }
  const double h = static_cast<double>(horizon_ms) * kSlotSeconds;
  double phi[3] = {1.0, h, h * h};
  // Solve (A^T A) u = phi, then weight_i = u . row_i.
  double u[3];
  solve3(ata, phi, u);
  weights_.resize(static_cast<std::size_t>(history_len));
  for (int i = 0; i < history_len; ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    weights_[static_cast<std::size_t>(i)] = u[0] + u[1] * t + u[2] * t * t;
  }
}

Vec3 NewtonExtrapolator::predict(std::span<const Vec3> history) const {
  if (static_cast<int>(history.size()) != history_len_) {
    throw ShapeError("newton_predict: history must have exactly " +
                     std::to_string(history_len_) + " points");
  }
  Vec3 out;
  for (int i = 0; i < history_len_; ++i) {
    const double w = weights_[static_cast<std::size_t>(i)];
    out.x += w * history[static_cast<std::size_t>(i)].x;
    out.y += w * history[static_cast<std::size_t>(i)].y;
    out.z += w * history[static_cast<std::size_t>(i)].z;
  }
  return out;
}

Vec3 newton_predict(std::span<const Vec3> history, int horizon_ms) {
  NewtonExtrapolator ex(static_cast<int>(history.size()), horizon_ms);
  return ex.predict(history);
}

PredictorDataset build_predictor_dataset(const Trajectory& traj, int history_len,
                                         int horizon_len, int n_samples,
                                         std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("build_predictor_dataset: n_samples >= 1");
  const std::int64_t span = history_len + horizon_len;
  const std::int64_t starts = traj.length() - span + 1;
  if (starts < 1) {
    throw InsufficientDataError("trajectory shorter than history + horizon");
  }
  PredictorDataset ds;
  ds.history_len = history_len;
  ds.horizon_len = horizon_len;
  ds.inputs.reserve(static_cast<std::size_t>(n_samples));
  ds.targets.reserve(static_cast<std::size_t>(n_samples));
  RngStream rng = RngStream(seed).child(0x646174ULL);
  for (int s = 0; s < n_samples; ++s) {
    const auto start = static_cast<std::size_t>(
        static_cast<std::int64_t>(rng.uniform01() * static_cast<double>(starts)));
    const Vec3 anchor = traj.positions[start + static_cast<std::size_t>(history_len) - 1];
    std::vector<double> in;
    in.reserve(static_cast<std::size_t>(history_len) * 3);
    for (int i = 0; i < history_len; ++i) {
      const Vec3 d = traj.positions[start + static_cast<std::size_t>(i)] - anchor;
      in.push_back(d.x * kFeatureScale);
      in.push_back(d.y * kFeatureScale);
      in.push_back(d.z * kFeatureScale);
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon_len) * 3);
    for (int i = 0; i < horizon_len; ++i) {
      const Vec3 d =
          traj.positions[start + static_cast<std::size_t>(history_len + i)] - anchor;
      out.push_back(d.x * kFeatureScale);
      out.push_back(d.y * kFeatureScale);
      out.push_back(d.z * kFeatureScale);
    }
    ds.inputs.push_back(std::move(in));
    ds.targets.push_back(std::move(out));
  }
  return ds;
}

nn::MlpParams train_mlp_predictor(const PredictorDataset& dataset,
                                  const PredictorTrainConfig& cfg, TrainLog* log) {
  if (dataset.inputs.empty()) throw ConfigError("train_mlp_predictor: empty dataset");
  const int in_dim = static_cast<int>(dataset.inputs.front().size());
  const int out_dim = static_cast<int>(dataset.targets.front().size());

  std::vector<int> sizes;
  sizes.push_back(in_dim);
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(out_dim);
  nn::MlpParams net = nn::mlp_init(sizes, nn::Activation::kTanh,
                                   nn::Activation::kIdentity, cfg.seed);
  nn::SgdMomentum opt(net, cfg.learning_rate, cfg.momentum);
  const nn::FreezeMask mask = nn::FreezeMask::all_trainable(net.num_weight_layers());

  const std::size_t n = dataset.inputs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream shuffle_rng = RngStream(cfg.seed).child(0x736875ULL);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own stream keeps epochs reproducible.
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.uniform01() *
                                              static_cast<double>(i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < n) {
      const std::size_t batch = std::min<std::size_t>(
          static_cast<std::size_t>(cfg.batch_size), n - done);
      nn::Gradients acc = nn::zero_gradients(net);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = order[done + b];
        const std::vector<double> pred = nn::forward(net, dataset.inputs[idx]);
        epoch_loss += nn::mse(pred, dataset.targets[idx]);
        const std::vector<double> g = nn::mse_output_grad(pred, dataset.targets[idx]);
        nn::BackwardResult back = nn::backward(net, dataset.inputs[idx], g);
        for (std::size_t l = 0; l < acc.weights.size(); ++l) {
          for (std::size_t i = 0; i < acc.weights[l].size(); ++i) {
            acc.weights[l][i] += back.grads.weights[l][i] / static_cast<double>(batch);
          }
          for (std::size_t i = 0; i < acc.biases[l].size(); ++i) {
            acc.biases[l][i] += back.grads.biases[l][i] / static_cast<double>(batch);
          }
        }
      }
      opt.step(net, acc, mask);
      done += batch;
    }
    opt.set_learning_rate(opt.learning_rate() * cfg.lr_decay);
    if (log) log->epoch_mse.push_back(epoch_loss / static_cast<double>(n));
  }
  return net;
}

double dataset_mse(const nn::MlpParams& net, const PredictorDataset& dataset) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dataset.inputs.size(); ++i) {
    acc += nn::mse(nn::forward(net, dataset.inputs[i]), dataset.targets[i]);
  }
  return acc / static_cast<double>(dataset.inputs.size());
}

std::vector<Vec3> mlp_predict_window(const nn::MlpParams& net,
                                     std::span<const Vec3> history, int horizon_len) {
  const Vec3 anchor = history[history.size() - 1];
  std::vector<double> in;
  in.reserve(history.size() * 3);
  for (const Vec3& p : history) {
    const Vec3 d = p - anchor;
    in.push_back(d.x * kFeatureScale);
    in.push_back(d.y * kFeatureScale);
    in.push_back(d.z * kFeatureScale);
  }
  const std::vector<double> out = nn::forward(net, in);
  if (static_cast<int>(out.size()) < horizon_len * 3) {
    throw ShapeError("mlp_predict_window: net output shorter than horizon");
  }
  std::vector<Vec3> preds(static_cast<std::size_t>(horizon_len));
  for (int h = 0; h < horizon_len; ++h) {
    preds[static_cast<std::size_t>(h)] =
        anchor + Vec3{out[static_cast<std::size_t>(3 * h)] / kFeatureScale,
                      out[static_cast<std::size_t>(3 * h + 1)] / kFeatureScale,
                      out[static_cast<std::size_t>(3 * h + 2)] / kFeatureScale};
  }
  return preds;
}

namespace {

// Shared sweep. `predict` fills one Vec3 per requested horizon.
std::vector<std::vector<double>> error_grid(
    const std::function<void(std::span<const Vec3>, std::vector<Vec3>&)>& predict,
    const Trajectory& traj, int history_len, const std::vector<int>& horizons,
    const std::vector<double>& accuracies, std::int64_t min_windows) {
  const int horizon_max = *std::max_element(horizons.begin(), horizons.end());
  const std::int64_t windows = traj.length() - history_len - horizon_max + 1;
  if (windows < min_windows) {
    throw InsufficientDataError(
        "eval_error_prob: need >= " + std::to_string(min_windows) +
        " windows, trajectory provides " + std::to_string(std::max<std::int64_t>(windows, 0)));
  }
  std::vector<std::vector<std::int64_t>> miss(
      horizons.size(), std::vector<std::int64_t>(accuracies.size(), 0));
  std::vector<Vec3> preds(horizons.size());
  for (std::int64_t w = 0; w < windows; ++w) {
    const std::span<const Vec3> hist(traj.positions.data() + w,
                                     static_cast<std::size_t>(history_len));
    predict(hist, preds);
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      const Vec3 truth =
          traj.positions[static_cast<std::size_t>(w + history_len - 1 + horizons[hi])];
      const double err = (preds[hi] - truth).norm();
      for (std::size_t ai = 0; ai < accuracies.size(); ++ai) {
        if (err > accuracies[ai]) ++miss[hi][ai];
      }
    }
  }
  std::vector<std::vector<double>> probs(horizons.size(),
                                         std::vector<double>(accuracies.size(), 0.0));
  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    for (std::size_t ai = 0; ai < accuracies.size(); ++ai) {
      probs[hi][ai] = static_cast<double>(miss[hi][ai]) / static_cast<double>(windows);
    }
  }
  return probs;
}

}  // namespace

std::vector<std::vector<double>> newton_error_grid(
    const Trajectory& traj, int history_len, const std::vector<int>& horizons,
    const std::vector<double>& accuracies, std::int64_t min_windows) {
  std::vector<NewtonExtrapolator> exs;
  exs.reserve(horizons.size());
  for (int h : horizons) exs.emplace_back(history_len, h);
  auto predict = [&exs](std::span<const Vec3> hist, std::vector<Vec3>& out) {
    for (std::size_t i = 0; i < exs.size(); ++i) out[i] = exs[i].predict(hist);
  };
  return error_grid(predict, traj, history_len, horizons, accuracies, min_windows);
}

std::vector<std::vector<double>> mlp_error_grid(
    const nn::MlpParams& net, const Trajectory& traj, int history_len,
    const std::vector<int>& horizons, const std::vector<double>& accuracies,
    std::int64_t min_windows) {
  const int horizon_len = net.output_dim() / 3;
  auto predict = [&net, &horizons, horizon_len](std::span<const Vec3> hist,
                                                std::vector<Vec3>& out) {
    const std::vector<Vec3> all = mlp_predict_window(net, hist, horizon_len);
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      out[i] = all[static_cast<std::size_t>(horizons[i] - 1)];
    }
  };
  return error_grid(predict, traj, history_len, horizons, accuracies, min_windows);
}

double eval_error_prob_newton(const Trajectory& traj, const PredictionSpec& spec,
                              std::int64_t min_windows) {
  return newton_error_grid(traj, spec.history_ms, {spec.horizon_ms},
                           {spec.accuracy_m}, min_windows)[0][0];
}

double eval_error_prob_mlp(const nn::MlpParams& net, const Trajectory& traj,
                           const PredictionSpec& spec, std::int64_t min_windows) {
  return mlp_error_grid(net, traj, spec.history_ms, {spec.horizon_ms},
                        {spec.accuracy_m}, min_windows)[0][0];
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open trajectory file for writing: " + path);
  f << "t_ms,x,y,z\n";
  f.precision(17);
  for (std::int64_t t = 0; t < traj.length(); ++t) {
    const Vec3& p = traj.positions[static_cast<std::size_t>(t)];
    f << t << ',' << p.x << ',' << p.y << ',' << p.z << '\n';
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open trajectory file: " + path);
  Trajectory traj;
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty trajectory file");
  std::int64_t expected_t = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    Vec3 p;
    std::int64_t t = 0;
    try {
      if (!std::getline(ss, field, ',')) throw ParseError("short row");
      t = std::stoll(field);
      if (!std::getline(ss, field, ',')) throw ParseError("short row");
      p.x = std::stod(field);
      if (!std::getline(ss, field, ',')) throw ParseError("short row");
      p.y = std::stod(field);
      if (!std::getline(ss, field, ',')) throw ParseError("short row");
      p.z = std::stod(field);
    } catch (const std::exception&) {
      throw ParseError("bad trajectory row: " + line);
    }
    if (t != expected_t++) throw ParseError("non-uniform slot index in trajectory");
    traj.positions.push_back(p);
  }
  return traj;
}

}  // namespace urllc::mobility
