#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "urllc/nn.hpp"
#include "urllc/rng.hpp"

namespace urllc::assoc {

// 2-AP / 10-MU offloading and association: exhaustive-search oracle
// minimizing the maximal normalized energy (J/bit) under per-class QoS,
// a highest-gain baseline, and a supervised DNN approximator.

enum class Decision : std::uint8_t { kLocal = 0, kAp1 = 1, kAp2 = 2 };

enum class ServiceClass : std::uint8_t { kUrllc = 0, kDelayTolerant = 1 };

enum class RegionRatio : std::uint8_t { k5to5 = 0, k9to1 = 1 };

struct MobileUser {
  ServiceClass service = ServiceClass::kUrllc;
  double gain_ap1 = 0.0;          // linear large-scale gain
  double gain_ap2 = 0.0;
  double arrival_rate_pps = 0.0;  // average packet arrival rate
  double tx_power_w = 0.1;
  double local_rate_cps = 1e9;    // local CPU, cycles/s
  double kappa = 1e-27;           // local energy coefficient, J/cycle^3 * s^2
  int region = 0;                 // 1 or 2, bookkeeping only
};

struct AssocParams {
  double ap_bandwidth_hz = 10e6;     // per AP, equally split among offloaders
  double mec_rate_cps = 3e9;         // MEC CPU, cycles/s, M/M/1-shared per AP
  double noise_psd = 3.9810717055349565e-21;
  int packet_bits = 1600;
  double cycles_per_bit = 1000.0;
  double urllc_delay_bound_ms = 10.0;
  double dt_delay_bound_ms = 100.0;
  double urllc_eps_max = 1e-5;
  double frame_ms = 1.0;             // URLLC radio frame; blocklength = share * frame
  // Geometry: APs on the x axis, one disc region around each.
  double ap_spacing_m = 250.0;
  double region_radius_m = 100.0;
  double region_radius_min_m = 5.0;
  double rate_min_pps = 50.0;
  double rate_max_pps = 300.0;
};

struct AssocInstance {
  std::vector<MobileUser> users;  // 10: first 5 URLLC, last 5 delay-tolerant
  AssocParams params;
  RegionRatio ratio = RegionRatio::k5to5;
};

struct Assignment {
  std::vector<Decision> decisions;  // one per MU
};

struct EnergyReport {
  std::vector<double> energy_per_bit;  // J/bit per MU
  double objective = 0.0;              // max over MUs
  bool feasible = false;
  std::vector<std::uint8_t> mu_feasible;  // per-MU QoS verdict
};

AssocInstance gen_instance(RegionRatio ratio, std::uint64_t seed,
                           const AssocParams& params = AssocParams{});

// Energy and QoS evaluation under the documented model:
//  LOCAL   e/bit = kappa * f_local^2 * cycles_per_bit; delay = M/M/1 at the
//          local CPU with the MU's own arrival rate.
//  OFFLOAD e/bit = P_tx / R with R the Shannon rate over the MU's equal
//          share of the AP bandwidth; delay = packet/R + M/M/1 at the MEC
//          shared by that AP's offloaders; URLLC offloads additionally need
//          decoding error <= eps_max on a share-of-frame blocklength.
// Infeasible is a result, not an error.
EnergyReport evaluate_assignment(const AssocInstance& instance, const Assignment& assignment);

struct OptimalResult {
  Assignment assignment;
  EnergyReport report;
};

// Full enumeration of the 3^n assignments (n <= 12); among feasible ones the
// minimal objective wins, ties broken by lexicographically smallest decision
// vector (LOCAL < AP1 < AP2). When nothing is feasible, returns the
// best-effort minimal-objective assignment with report.feasible == false.
OptimalResult exhaustive_optimal(const AssocInstance& instance);

// Every MU offloads to the AP with the higher large-scale gain; ties to AP1.
Assignment highest_snr_baseline(const AssocInstance& instance);

// Normalized feature vector: (log-gain to AP1, log-gain to AP2, rate) per MU.
std::vector<double> instance_features(const AssocInstance& instance);
inline constexpr int kFeaturesPerUser = 3;

struct Dataset {
  std::vector<std::vector<double>> features;   // 3 * n_users
  std::vector<std::vector<int>> labels;        // per-MU decision index
  std::vector<std::uint64_t> instance_seeds;   // regenerate any row's instance
};

// Oracle-labeled instances; infeasible draws are discarded and redrawn.
// Throws ConfigError if more than half of the draws come back infeasible.
Dataset build_dataset(int n_samples, RegionRatio ratio, std::uint64_t seed,
                      const AssocParams& params = AssocParams{});

struct AssocTrainConfig {
  std::vector<int> hidden = {100, 100, 100, 100};
  int epochs = 200;
  int batch_size = 40;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double lr_decay = 0.99;
  std::uint64_t seed = 1;
};

struct AssocTrainLog {
  std::vector<double> epoch_loss;      // mean cross-entropy
  std::vector<double> epoch_accuracy;  // per-decision train accuracy
};

nn::MlpParams train_assoc_dnn(const Dataset& dataset, const AssocTrainConfig& cfg,
                              AssocTrainLog* log = nullptr);

// Continue training on shifted-distribution samples. kAllLayers retrains
// everything; kLastK freezes all but the last `last_k` layers.
enum class FineTuneMode { kAllLayers, kLastK };

nn::MlpParams fine_tune_on_shift(const nn::MlpParams& dnn, const Dataset& new_samples,
                                 FineTuneMode mode, const AssocTrainConfig& cfg,
                                 int last_k = 2, AssocTrainLog* log = nullptr);

// Per-MU argmax over the 3-way heads, then a conservative repair loop: while
// the assignment is infeasible, move the least-margin infeasible MU to LOCAL
// (at most one pass over the users; all-LOCAL is always feasible here).
Assignment infer_assignment(const nn::MlpParams& dnn, const AssocInstance& instance);

double decision_accuracy(const nn::MlpParams& dnn, const Dataset& dataset);

}  // namespace urllc::assoc
