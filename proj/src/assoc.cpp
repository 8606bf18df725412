#include "urllc/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "urllc/errors.hpp"
#include "urllc/radio.hpp"

namespace urllc::assoc {

namespace {

constexpr int kNumAps = 2;

// Feature normalization constants: log10 gains span roughly [-13.1, -6.2]
// over the 5..350 m geometry.
constexpr double kLogGainCenter = -9.65;
constexpr double kLogGainHalfSpan = 3.45;

double cycles_per_packet(const AssocParams& p) {
  return p.cycles_per_bit * static_cast<double>(p.packet_bits);
}

// M/M/1 sojourn time in seconds; negative when unstable.
double mm1_delay_s(double service_s, double arrival_rate_pps) {
  const double rho = arrival_rate_pps * service_s;
  if (rho >= 1.0) return -1.0;
  return service_s / (1.0 - rho);
}

double delay_bound_ms(const AssocParams& p, ServiceClass c) {
  return c == ServiceClass::kUrllc ? p.urllc_delay_bound_ms : p.dt_delay_bound_ms;
}

struct OffloadPoint {
  double energy_per_bit = 0.0;
  double tx_delay_s = 0.0;
  bool eps_ok = false;
};

// Per-(MU, AP, #offloaders) radio quantities; MEC queueing is the only part
// that depends on which other MUs share the AP.
struct EvalTables {
  std::vector<double> local_energy;              // per MU
  std::vector<double> local_delay_s;             // <0 when unstable
  std::vector<std::array<std::vector<OffloadPoint>, kNumAps>> offload;  // [mu][ap][k]
  double mec_service_s = 0.0;
};

EvalTables build_tables(const AssocInstance& inst) {
  const AssocParams& p = inst.params;
  const int n = static_cast<int>(inst.users.size());
  EvalTables t;
  t.mec_service_s = cycles_per_packet(p) / p.mec_rate_cps;
  t.local_energy.resize(n);
  t.local_delay_s.resize(n);
  t.offload.resize(n);
  for (int m = 0; m < n; ++m) {
    const MobileUser& mu = inst.users[static_cast<std::size_t>(m)];
    t.local_energy[m] = mu.kappa * mu.local_rate_cps * mu.local_rate_cps * p.cycles_per_bit;
    t.local_delay_s[m] =
        mm1_delay_s(cycles_per_packet(p) / mu.local_rate_cps, mu.arrival_rate_pps);
    for (int ap = 0; ap < kNumAps; ++ap) {
      auto& per_k = t.offload[static_cast<std::size_t>(m)][static_cast<std::size_t>(ap)];
      per_k.resize(static_cast<std::size_t>(n) + 1);
      const double gain = ap == 0 ? mu.gain_ap1 : mu.gain_ap2;
      for (int k = 1; k <= n; ++k) {
        const double share_hz = p.ap_bandwidth_hz / static_cast<double>(k);
        const double snr = mu.tx_power_w * gain / (p.noise_psd * share_hz);
        const double rate_bps = share_hz * std::log2(1.0 + snr);
        OffloadPoint pt;
        pt.energy_per_bit = mu.tx_power_w / rate_bps;
        pt.tx_delay_s = static_cast<double>(p.packet_bits) / rate_bps;
        if (mu.service == ServiceClass::kUrllc) {
          const int blocklength = std::max(
              1, static_cast<int>(share_hz * p.frame_ms / 1000.0));
          const double eps = radio::decoding_error_prob(
              snr, radio::CodingConfig{blocklength, p.packet_bits});
          pt.eps_ok = eps <= p.urllc_eps_max;
        } else {
          pt.eps_ok = true;
        }
        per_k[static_cast<std::size_t>(k)] = pt;
      }
    }
  }
  return t;
}

EnergyReport evaluate_with_tables(const AssocInstance& inst, const EvalTables& t,
                                  const std::vector<Decision>& decisions) {
  const AssocParams& p = inst.params;
  const int n = static_cast<int>(inst.users.size());
  int k[kNumAps] = {0, 0};
  double lam[kNumAps] = {0.0, 0.0};
  for (int m = 0; m < n; ++m) {
    const Decision d = decisions[static_cast<std::size_t>(m)];
    if (d != Decision::kLocal) {
      const int ap = d == Decision::kAp1 ? 0 : 1;
      ++k[ap];
      lam[ap] += inst.users[static_cast<std::size_t>(m)].arrival_rate_pps;
    }
  }
  double mec_delay[kNumAps];
  for (int ap = 0; ap < kNumAps; ++ap) {
    mec_delay[ap] = k[ap] > 0 ? mm1_delay_s(t.mec_service_s, lam[ap]) : 0.0;
  }

  EnergyReport rep;
  rep.energy_per_bit.resize(n);
  rep.mu_feasible.assign(static_cast<std::size_t>(n), 1);
  rep.feasible = true;
  rep.objective = 0.0;
  for (int m = 0; m < n; ++m) {
    const MobileUser& mu = inst.users[static_cast<std::size_t>(m)];
    const Decision d = decisions[static_cast<std::size_t>(m)];
    const double bound_s = delay_bound_ms(p, mu.service) / 1000.0;
    double energy;
    bool ok;
    if (d == Decision::kLocal) {
      energy = t.local_energy[m];
      ok = t.local_delay_s[m] >= 0.0 && t.local_delay_s[m] <= bound_s;
    } else {
      const int ap = d == Decision::kAp1 ? 0 : 1;
      const OffloadPoint& pt =
          t.offload[static_cast<std::size_t>(m)][static_cast<std::size_t>(ap)]
                   [static_cast<std::size_t>(k[ap])];
      energy = pt.energy_per_bit;
      ok = pt.eps_ok && mec_delay[ap] >= 0.0 &&
           pt.tx_delay_s + mec_delay[ap] <= bound_s;
    }
    rep.energy_per_bit[m] = energy;
    rep.objective = std::max(rep.objective, energy);
    if (!ok) {
      rep.mu_feasible[static_cast<std::size_t>(m)] = 0;
      rep.feasible = false;
    }
  }
  return rep;
}

}  // namespace

AssocInstance gen_instance(RegionRatio ratio, std::uint64_t seed,
                           const AssocParams& params) {
  AssocInstance inst;
  inst.params = params;
  inst.ratio = ratio;
  const int n = 10;
  inst.users.resize(n);

  RngStream rng = RngStream(seed).child(0x617373ULL);

  // Which MUs sit in region 1 (classes stay fixed: MU 0-4 URLLC, 5-9 DT).
  const int n_region1 = ratio == RegionRatio::k5to5 ? 5 : 9;
  std::vector<int> shuffled(n);
  for (int i = 0; i < n; ++i) shuffled[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform01() * static_cast<double>(i + 1));
    std::swap(shuffled[static_cast<std::size_t>(i)], shuffled[static_cast<std::size_t>(j)]);
  }

  const double ap_x[kNumAps] = {-params.ap_spacing_m / 2.0, params.ap_spacing_m / 2.0};
  for (int idx = 0; idx < n; ++idx) {
    const int m = shuffled[static_cast<std::size_t>(idx)];
    MobileUser& mu = inst.users[static_cast<std::size_t>(m)];
    mu.service = m < 5 ? ServiceClass::kUrllc : ServiceClass::kDelayTolerant;
    mu.region = idx < n_region1 ? 1 : 2;
    const int home_ap = mu.region - 1;

    const double r_lo = params.region_radius_min_m;
    const double r_hi = params.region_radius_m;
    const double r = std::sqrt(rng.uniform(r_lo * r_lo, r_hi * r_hi));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x = ap_x[home_ap] + r * std::cos(theta);
    const double y = r * std::sin(theta);

    const double d1 = std::max(1.0, std::hypot(x - ap_x[0], y));
    const double d2 = std::max(1.0, std::hypot(x - ap_x[1], y));
    mu.gain_ap1 = radio::large_scale_gain(d1);
    mu.gain_ap2 = radio::large_scale_gain(d2);
    mu.arrival_rate_pps = rng.uniform(params.rate_min_pps, params.rate_max_pps);
  }
  return inst;
}

EnergyReport evaluate_assignment(const AssocInstance& instance,
                                 const Assignment& assignment) {
  if (assignment.decisions.size() != instance.users.size()) {
    throw ShapeError("evaluate_assignment: decision count != user count");
  }
  const EvalTables t = build_tables(instance);
  return evaluate_with_tables(instance, t, assignment.decisions);
}

OptimalResult exhaustive_optimal(const AssocInstance& instance) {
  const int n = static_cast<int>(instance.users.size());
  if (n > 12) throw ConfigError("exhaustive_optimal: capped at 12 MUs (3^12)");
  const AssocParams& p = instance.params;
  const EvalTables t = build_tables(instance);

  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;

  // Odometer enumeration, MU 0 as the most significant digit: ascending
  // index order is lexicographic order, so strict improvement keeps the
  // lexicographically smallest among ties.
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  int k[kNumAps] = {0, 0};
  double lam[kNumAps] = {0.0, 0.0};

  double best_feasible_obj = std::numeric_limits<double>::infinity();
  double best_any_obj = std::numeric_limits<double>::infinity();
  std::vector<int> best_feasible_digits, best_any_digits;

  std::vector<double> bound_s(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    bound_s[static_cast<std::size_t>(m)] =
        delay_bound_ms(p, instance.users[static_cast<std::size_t>(m)].service) / 1000.0;
  }

  for (std::int64_t it = 0; it < total; ++it) {
    double mec_delay[kNumAps];
    bool mec_stable[kNumAps];
    for (int ap = 0; ap < kNumAps; ++ap) {
      if (k[ap] > 0) {
        mec_delay[ap] = mm1_delay_s(t.mec_service_s, lam[ap]);
        mec_stable[ap] = mec_delay[ap] >= 0.0;
      } else {
        mec_delay[ap] = 0.0;
        mec_stable[ap] = true;
      }
    }

    double obj = 0.0;
    bool feasible = true;
    for (int m = 0; m < n; ++m) {
      const int d = digits[static_cast<std::size_t>(m)];
      if (d == 0) {
        obj = std::max(obj, t.local_energy[m]);
        if (!(t.local_delay_s[m] >= 0.0 &&
              t.local_delay_s[m] <= bound_s[static_cast<std::size_t>(m)])) {
          feasible = false;
        }
      } else {
        const int ap = d - 1;
        const OffloadPoint& pt =
            t.offload[static_cast<std::size_t>(m)][static_cast<std::size_t>(ap)]
                     [static_cast<std::size_t>(k[ap])];
        obj = std::max(obj, pt.energy_per_bit);
        if (!(pt.eps_ok && mec_stable[ap] &&
              pt.tx_delay_s + mec_delay[ap] <= bound_s[static_cast<std::size_t>(m)])) {
          feasible = false;
        }
      }
    }
    if (obj < best_any_obj) {
      best_any_obj = obj;
      best_any_digits = digits;
    }
    if (feasible && obj < best_feasible_obj) {
      best_feasible_obj = obj;
      best_feasible_digits = digits;
    }

    // Increment the odometer (least significant digit last).
    for (int m = n - 1; m >= 0; --m) {
      int& d = digits[static_cast<std::size_t>(m)];
      const double rate = instance.users[static_cast<std::size_t>(m)].arrival_rate_pps;
      if (d != 0) {
        --k[d - 1];
        lam[d - 1] -= rate;
      }
      d = (d + 1) % 3;
      if (d != 0) {
        ++k[d - 1];
        lam[d - 1] += rate;
      }
      if (d != 0) break;  // no carry
    }
  }

  OptimalResult res;
  const std::vector<int>& chosen =
      best_feasible_digits.empty() ? best_any_digits : best_feasible_digits;
  res.assignment.decisions.reserve(static_cast<std::size_t>(n));
  for (int d : chosen) res.assignment.decisions.push_back(static_cast<Decision>(d));
  res.report = evaluate_with_tables(instance, t, res.assignment.decisions);
  return res;
}

Assignment highest_snr_baseline(const AssocInstance& instance) {
  Assignment a;
  a.decisions.reserve(instance.users.size());
  for (const MobileUser& mu : instance.users) {
    a.decisions.push_back(mu.gain_ap1 >= mu.gain_ap2 ? Decision::kAp1 : Decision::kAp2);
  }
  return a;
}

std::vector<double> instance_features(const AssocInstance& instance) {
  const AssocParams& p = instance.params;
  const double rate_mid = 0.5 * (p.rate_min_pps + p.rate_max_pps);
  const double rate_half = 0.5 * (p.rate_max_pps - p.rate_min_pps);
  std::vector<double> f;
  f.reserve(instance.users.size() * kFeaturesPerUser);
  for (const MobileUser& mu : instance.users) {
    f.push_back((std::log10(mu.gain_ap1) - kLogGainCenter) / kLogGainHalfSpan);
    f.push_back((std::log10(mu.gain_ap2) - kLogGainCenter) / kLogGainHalfSpan);
    f.push_back((mu.arrival_rate_pps - rate_mid) / rate_half);
  }
  return f;
}

Dataset build_dataset(int n_samples, RegionRatio ratio, std::uint64_t seed,
                      const AssocParams& params) {
  if (n_samples < 1) throw ConfigError("build_dataset: n_samples >= 1");
  Dataset ds;
  ds.features.reserve(static_cast<std::size_t>(n_samples));
  ds.labels.reserve(static_cast<std::size_t>(n_samples));
  RngStream seeder = RngStream(seed).child(0x647367ULL);
  int discarded = 0;
  std::uint64_t draw = 0;
  while (static_cast<int>(ds.features.size()) < n_samples) {
    const std::uint64_t inst_seed = seeder.child(draw++).seed();
    const AssocInstance inst = gen_instance(ratio, inst_seed, params);
    const OptimalResult opt = exhaustive_optimal(inst);
    if (!opt.report.feasible) {
      if (++discarded > n_samples) {
        throw ConfigError("build_dataset: >50% infeasible instances; parameters implausible");
      }
      continue;
    }
    ds.instance_seeds.push_back(inst_seed);
    ds.features.push_back(instance_features(inst));
    std::vector<int> label;
    label.reserve(inst.users.size());
    for (Decision d : opt.assignment.decisions) label.push_back(static_cast<int>(d));
    ds.labels.push_back(std::move(label));
  }
  return ds;
}

namespace {

nn::MlpParams train_on(const Dataset& dataset, nn::MlpParams net,
                       const AssocTrainConfig& cfg, const nn::FreezeMask& mask,
                       AssocTrainLog* log) {
  if (dataset.features.empty()) throw ConfigError("assoc training: empty dataset");
  nn::SgdMomentum opt(net, cfg.learning_rate, cfg.momentum);
  const std::size_t n = dataset.features.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream shuffle_rng = RngStream(cfg.seed).child(0x616f72ULL);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.uniform01() *
                                              static_cast<double>(i + 1));
      std::swap(order[i], order[j]);
    }
    double loss_sum = 0.0;
    std::int64_t correct = 0, decisions = 0;
    std::size_t done = 0;
    while (done < n) {
      const std::size_t batch =
          std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n - done);
      nn::Gradients acc = nn::zero_gradients(net);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = order[done + b];
        const std::vector<double>& x = dataset.features[idx];
        const std::vector<int>& y = dataset.labels[idx];
        const std::vector<double> out = nn::forward(net, x);
        loss_sum += nn::cross_entropy(out, y, 3);
        for (std::size_t u = 0; u < y.size(); ++u) {
          const std::size_t base = u * 3;
          int arg = 0;
          for (int c = 1; c < 3; ++c) {
            if (out[base + static_cast<std::size_t>(c)] >
                out[base + static_cast<std::size_t>(arg)]) {
              arg = c;
            }
          }
          correct += arg == y[u] ? 1 : 0;
          ++decisions;
        }
        const std::vector<double> g = nn::cross_entropy_output_grad(out, y, 3);
        const nn::BackwardResult back = nn::backward(net, x, g);
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
    if (log) {
      log->epoch_loss.push_back(loss_sum / static_cast<double>(n));
      log->epoch_accuracy.push_back(static_cast<double>(correct) /
                                    static_cast<double>(decisions));
    }
  }
  return net;
}

}  // namespace

nn::MlpParams train_assoc_dnn(const Dataset& dataset, const AssocTrainConfig& cfg,
                              AssocTrainLog* log) {
  const int in_dim = static_cast<int>(dataset.features.front().size());
  const int out_dim = static_cast<int>(dataset.labels.front().size()) * 3;
  std::vector<int> sizes;
  sizes.push_back(in_dim);
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(out_dim);
  nn::MlpParams net =
      nn::mlp_init(sizes, nn::Activation::kRelu, nn::Activation::kSoftmax, cfg.seed, 3);
  const nn::FreezeMask mask = nn::FreezeMask::all_trainable(net.num_weight_layers());
  return train_on(dataset, std::move(net), cfg, mask, log);
}

nn::MlpParams fine_tune_on_shift(const nn::MlpParams& dnn, const Dataset& new_samples,
                                 FineTuneMode mode, const AssocTrainConfig& cfg,
                                 int last_k, AssocTrainLog* log) {
  if (new_samples.features.empty()) return dnn;
  const nn::FreezeMask mask =
      mode == FineTuneMode::kAllLayers
          ? nn::FreezeMask::all_trainable(dnn.num_weight_layers())
          : nn::FreezeMask::last_k_trainable(dnn.num_weight_layers(), last_k);
  return train_on(new_samples, dnn, cfg, mask, log);
}

Assignment infer_assignment(const nn::MlpParams& dnn, const AssocInstance& instance) {
  const std::vector<double> out = nn::forward(dnn, instance_features(instance));
  const std::size_t n = instance.users.size();
  Assignment a;
  a.decisions.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t base = u * 3;
    int arg = 0;
    for (int c = 1; c < 3; ++c) {
      if (out[base + static_cast<std::size_t>(c)] > out[base + static_cast<std::size_t>(arg)]) {
        arg = c;
      }
    }
    a.decisions[u] = static_cast<Decision>(arg);
  }

  // Conservative repair: pull offloaders back to LOCAL until the QoS check
  // clears. Each move strictly unloads an AP, and all-LOCAL is feasible for
  // the parameter ranges generated here, so <= n moves suffice.
  for (std::size_t iter = 0; iter < n; ++iter) {
    const EnergyReport rep = evaluate_assignment(instance, a);
    if (rep.feasible) break;
    int worst = -1;
    double worst_energy = -1.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (!rep.mu_feasible[m] && a.decisions[m] != Decision::kLocal &&
          rep.energy_per_bit[m] > worst_energy) {
        worst = static_cast<int>(m);
        worst_energy = rep.energy_per_bit[m];
      }
    }
    if (worst < 0) break;  // infeasible MUs are already local; nothing to repair
    a.decisions[static_cast<std::size_t>(worst)] = Decision::kLocal;
  }
  return a;
}

double decision_accuracy(const nn::MlpParams& dnn, const Dataset& dataset) {
  std::int64_t correct = 0, total = 0;
  for (std::size_t i = 0; i < dataset.features.size(); ++i) {
    const std::vector<double> out = nn::forward(dnn, dataset.features[i]);
    for (std::size_t u = 0; u < dataset.labels[i].size(); ++u) {
      const std::size_t base = u * 3;
      int arg = 0;
      for (int c = 1; c < 3; ++c) {
        if (out[base + static_cast<std::size_t>(c)] > out[base + static_cast<std::size_t>(arg)]) {
          arg = c;
        }
      }
      correct += arg == dataset.labels[i][u] ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace urllc::assoc
