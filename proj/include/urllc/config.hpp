#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urllc/assoc.hpp"
#include "urllc/mobility.hpp"
#include "urllc/scheduler.hpp"

namespace urllc::config {

// Flat, typed key=value config with one [section] per module. Unknown keys
// are rejected with the offending line; contradictory values fail fast.
// Defaults carry the experiment setup from the evaluation scenarios
// (D_min=9 ms, D_max=11 ms, 5 MHz, 100 pkt/s, 200-byte packets, 2x40 actor,
// 2x60 critic, 8000 association samples, ...).

struct MobilityExpConfig {
  mobility::TrajectoryConfig trajectory;   // evaluation trajectory
  std::int64_t train_duration_ms = 300000;
  int history_ms = 50;
  std::vector<int> horizons_ms = {5, 10, 20};
  std::vector<double> accuracies_m = {0.02, 0.005};
  int train_samples = 10000;
  int heldout_samples = 2000;
  mobility::PredictorTrainConfig train;
};

struct SchedulerExpConfig {
  scheduler::SchedulerConfig env;          // mismatch fields hold the "real world" knobs
  scheduler::DrlConfig pretrain;
  scheduler::DrlConfig finetune;
  std::int64_t eval_packets = 1000000;
};

struct AssocExpConfig {
  assoc::AssocParams params;
  int train_samples = 8000;
  int heldout_samples = 2000;
  int eval_instances = 500;
  int dominance_instances = 200;
  int random_feasible_per_instance = 1000;
  int finetune_samples = 500;
  assoc::AssocTrainConfig train;
  assoc::AssocTrainConfig finetune;        // reduced-lr continuation on 9:1
  bool finetune_all_layers = true;
};

struct FedExpConfig {
  int cells = 2;
  int locals_per_cell = 3;
  std::int64_t shard_duration_ms = 150000;
  int samples_per_local = 2000;
  int heldout_samples = 2000;
  mobility::PredictorTrainConfig train;    // small nets train fast per shard
  std::vector<int> hidden = {60, 60};
  int horizon_ms = 20;
};

struct ExperimentConfig {
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  int jobs = 1;
  MobilityExpConfig mobility;
  SchedulerExpConfig scheduler;
  AssocExpConfig assoc;
  FedExpConfig fed;
};

ExperimentConfig default_config();

// Parse + validate; empty text yields the full defaults.
ExperimentConfig parse_config_text(const std::string& text);

// Reads the file (ConfigError if missing) and parses it.
ExperimentConfig validate_config(const std::string& path);

// Resolved-config echo, emitted into run reports; reparsing it reproduces
// the exact configuration.
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace urllc::config
