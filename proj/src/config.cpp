#include "urllc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "urllc/errors.hpp"

namespace urllc::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

std::int64_t parse_i64(const std::string& v) {
  std::size_t pos = 0;
  const long long x = std::stoll(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

std::uint64_t parse_u64(const std::string& v) {
  std::size_t pos = 0;
  const unsigned long long x = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(v);
}

template <typename T, T (*ParseOne)(const std::string&)>
std::vector<T> parse_list(const std::string& v) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseOne(trim(item)));
  if (out.empty()) throw std::invalid_argument(v);
  return out;
}

int parse_int(const std::string& v) {
  const std::int64_t x = parse_i64(v);
  return static_cast<int>(x);
}

mobility::TrajectoryKind parse_kind(const std::string& v) {
  if (v == "const_accel") return mobility::TrajectoryKind::kConstAccel;
  if (v == "smooth_random") return mobility::TrajectoryKind::kSmoothRandom;
  if (v == "sinusoid") return mobility::TrajectoryKind::kSinusoid;
  throw std::invalid_argument(v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

const Schema& schema() {
  static const Schema s = [] {
    Schema m;
    auto& run = m["run"];
    run["seed"] = [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); };
    run["out_dir"] = [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; };
    run["jobs"] = [](ExperimentConfig& c, const std::string& v) { c.jobs = parse_int(v); };

    auto& mob = m["mobility"];
    mob["kind"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.kind = parse_kind(v);
    };
    mob["duration_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.duration_ms = parse_i64(v);
    };
    mob["train_duration_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.train_duration_ms = parse_i64(v);
    };
    mob["noise_std_m"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.noise_std_m = parse_double(v);
    };
    mob["accel_std_mps2"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.accel_std_mps2 = parse_double(v);
    };
    mob["accel_tau_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.accel_tau_ms = parse_double(v);
    };
    mob["burst_scale"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.burst_scale = parse_double(v);
    };
    mob["burst_start_prob"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.burst_start_prob = parse_double(v);
    };
    mob["burst_stop_prob"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.burst_stop_prob = parse_double(v);
    };
    mob["v_max_mps"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.trajectory.v_max_mps = parse_double(v);
    };
    mob["history_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.history_ms = parse_int(v);
    };
    mob["horizons_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.horizons_ms = parse_list<int, parse_int>(v);
    };
    mob["accuracies_m"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.accuracies_m = parse_list<double, parse_double>(v);
    };
    mob["train_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.train_samples = parse_int(v);
    };
    mob["heldout_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.heldout_samples = parse_int(v);
    };
    mob["epochs"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.train.epochs = parse_int(v);
    };
    mob["batch_size"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.train.batch_size = parse_int(v);
    };
    mob["learning_rate"] = [](ExperimentConfig& c, const std::string& v) {
      c.mobility.train.learning_rate = parse_double(v);
    };

    auto& sch = m["scheduler"];
    sch["num_users"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.num_users = parse_int(v);
    };
    sch["total_bandwidth_hz"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.total_bandwidth_hz = parse_double(v);
    };
    sch["packet_bits"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.packet_bits = parse_int(v);
    };
    sch["arrival_rate_pps"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.arrival_rate_pps = parse_double(v);
    };
    sch["d_min_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.qos.d_min_ms = parse_int(v);
    };
    sch["d_max_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.qos.d_max_ms = parse_int(v);
    };
    sch["distances_m"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.distances_m = parse_list<double, parse_double>(v);
    };
    sch["tx_power_w"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.tx_power_w = parse_double(v);
    };
    sch["reward_lambda"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.reward_lambda = parse_double(v);
    };
    sch["jitter_mean_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.mismatch.jitter_mean_ms = parse_double(v);
    };
    sch["jitter_std_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.mismatch.jitter_std_ms = parse_double(v);
    };
    sch["jitter_max_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.mismatch.jitter_max_ms = parse_int(v);
    };
    sch["decode_penalty"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.mismatch.decode_penalty = parse_double(v);
    };
    sch["processing_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.env.processing_ms = parse_int(v);
    };
    sch["episodes"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.episodes = parse_int(v);
    };
    sch["slots_per_episode"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.slots_per_episode = parse_int(v);
      c.scheduler.finetune.slots_per_episode = parse_int(v);
    };
    sch["warmup_slots"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.warmup_slots = parse_int(v);
    };
    sch["batch_size"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.batch_size = parse_int(v);
      c.scheduler.finetune.batch_size = parse_int(v);
    };
    sch["update_every"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.update_every = parse_int(v);
      c.scheduler.finetune.update_every = parse_int(v);
    };
    sch["actor_lr"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.actor_lr = parse_double(v);
    };
    sch["critic_lr"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.critic_lr = parse_double(v);
    };
    sch["noise_std"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.noise_std = parse_double(v);
    };
    sch["discount"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.pretrain.discount = parse_double(v);
      c.scheduler.finetune.discount = parse_double(v);
    };
    sch["finetune_episodes"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.finetune.episodes = parse_int(v);
    };
    sch["finetune_actor_lr"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.finetune.actor_lr = parse_double(v);
    };
    sch["finetune_critic_lr"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.finetune.critic_lr = parse_double(v);
    };
    sch["finetune_noise_std"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.finetune.noise_std = parse_double(v);
    };
    sch["eval_packets"] = [](ExperimentConfig& c, const std::string& v) {
      c.scheduler.eval_packets = parse_i64(v);
    };

    auto& asc = m["assoc"];
    asc["ap_bandwidth_hz"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.params.ap_bandwidth_hz = parse_double(v);
    };
    asc["mec_rate_cps"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.params.mec_rate_cps = parse_double(v);
    };
    asc["train_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.train_samples = parse_int(v);
    };
    asc["heldout_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.heldout_samples = parse_int(v);
    };
    asc["eval_instances"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.eval_instances = parse_int(v);
    };
    asc["dominance_instances"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.dominance_instances = parse_int(v);
    };
    asc["random_feasible_per_instance"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.random_feasible_per_instance = parse_int(v);
    };
    asc["finetune_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.finetune_samples = parse_int(v);
    };
    asc["epochs"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.train.epochs = parse_int(v);
    };
    asc["batch_size"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.train.batch_size = parse_int(v);
      c.assoc.finetune.batch_size = parse_int(v);
    };
    asc["learning_rate"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.train.learning_rate = parse_double(v);
    };
    asc["finetune_epochs"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.finetune.epochs = parse_int(v);
    };
    asc["finetune_learning_rate"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.finetune.learning_rate = parse_double(v);
    };
    asc["finetune_all_layers"] = [](ExperimentConfig& c, const std::string& v) {
      c.assoc.finetune_all_layers = parse_bool(v);
    };

    auto& fed = m["fed"];
    fed["cells"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.cells = parse_int(v);
    };
    fed["locals_per_cell"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.locals_per_cell = parse_int(v);
    };
    fed["shard_duration_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.shard_duration_ms = parse_i64(v);
    };
    fed["samples_per_local"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.samples_per_local = parse_int(v);
    };
    fed["heldout_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.heldout_samples = parse_int(v);
    };
    fed["epochs"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.train.epochs = parse_int(v);
    };
    fed["horizon_ms"] = [](ExperimentConfig& c, const std::string& v) {
      c.fed.horizon_ms = parse_int(v);
    };
    return m;
  }();
  return s;
}

void cross_validate(const ExperimentConfig& c) {
  if (c.scheduler.env.qos.d_min_ms < 0 ||
      c.scheduler.env.qos.d_min_ms >= c.scheduler.env.qos.d_max_ms) {
    throw ConfigError("scheduler: requires 0 <= d_min_ms < d_max_ms, got d_min=" +
                      std::to_string(c.scheduler.env.qos.d_min_ms) +
                      " d_max=" + std::to_string(c.scheduler.env.qos.d_max_ms));
  }
  if (c.scheduler.env.num_users < 1) {
    throw ConfigError("scheduler: num_users must be >= 1");
  }
  if (static_cast<int>(c.scheduler.env.distances_m.size()) != c.scheduler.env.num_users) {
    throw ConfigError("scheduler: distances_m must list one distance per user");
  }
  if (c.scheduler.env.total_bandwidth_hz <= 0.0) {
    throw ConfigError("scheduler: total_bandwidth_hz must be positive");
  }
  if (c.scheduler.env.arrival_rate_pps <= 0.0) {
    throw ConfigError("scheduler: arrival_rate_pps must be positive");
  }
  if (c.scheduler.env.mismatch.decode_penalty < 1.0) {
    throw ConfigError("scheduler: decode_penalty must be >= 1");
  }
  if (c.scheduler.env.mismatch.jitter_mean_ms < 0.0 ||
      c.scheduler.env.mismatch.jitter_max_ms < 0) {
    throw ConfigError("scheduler: jitter offsets must be non-negative");
  }
  if (c.scheduler.env.processing_ms < 0 ||
      c.scheduler.env.processing_ms > c.scheduler.env.qos.d_min_ms) {
    throw ConfigError("scheduler: processing_ms must lie in [0, d_min_ms]");
  }
  if (c.mobility.trajectory.noise_std_m < 0.0) {
    throw ConfigError("mobility: noise_std_m must be non-negative");
  }
  if (c.mobility.history_ms < 3) {
    throw ConfigError("mobility: history_ms must be >= 3");
  }
  for (int h : c.mobility.horizons_ms) {
    if (h < 1 || h > 20) throw ConfigError("mobility: horizons must lie in [1, 20] ms");
  }
  if (c.assoc.params.rate_min_pps <= 0.0 ||
      c.assoc.params.rate_max_pps <= c.assoc.params.rate_min_pps) {
    throw ConfigError("assoc: rate range must satisfy 0 < min < max");
  }
  if (c.fed.cells < 1 || c.fed.locals_per_cell < 1) {
    throw ConfigError("fed: need at least one cell and one local per cell");
  }
  if (c.jobs < 1) throw ConfigError("run: jobs must be >= 1");
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  // Mobility evaluation horizon: 2e6 slots, like the 2x10^6 ms experiment.
  c.mobility.trajectory.duration_ms = 2000000;
  c.mobility.train.epochs = 120;
  c.mobility.train.learning_rate = 0.02;
  c.mobility.train.seed = 1;

  // Scheduler: pretraining budget in the ideal environment, then a shorter
  // low-noise continuation under mismatch.
  c.scheduler.pretrain.episodes = 260;
  c.scheduler.finetune.episodes = 160;
  c.scheduler.finetune.noise_std = 0.02;
  c.scheduler.finetune.actor_lr = 2e-5;
  c.scheduler.finetune.critic_lr = 2e-4;
  c.scheduler.finetune.warmup_slots = 0;

  c.assoc.train.epochs = 200;
  c.assoc.finetune.epochs = 200;
  c.assoc.finetune.learning_rate = 0.01;

  c.fed.train.epochs = 40;
  c.fed.train.hidden = {60, 60};
  c.fed.train.learning_rate = 0.02;
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg = default_config();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (schema().find(section) == schema().end()) {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                        "' outside any [section]");
    }
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                        "' in section [" + section + "]");
    }
    try {
      it->second(cfg, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value '" + value +
                        "' for key '" + key + "'");
    }
  }
  cross_validate(cfg);
  return cfg;
}

ExperimentConfig validate_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_echo(const ExperimentConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "[run]\n";
  o << "seed = " << c.seed << "\n";
  o << "out_dir = " << c.out_dir << "\n";
  o << "jobs = " << c.jobs << "\n\n";

  o << "[mobility]\n";
  const char* kind = "smooth_random";
  if (c.mobility.trajectory.kind == mobility::TrajectoryKind::kConstAccel) kind = "const_accel";
  if (c.mobility.trajectory.kind == mobility::TrajectoryKind::kSinusoid) kind = "sinusoid";
  o << "kind = " << kind << "\n";
  o << "duration_ms = " << c.mobility.trajectory.duration_ms << "\n";
  o << "train_duration_ms = " << c.mobility.train_duration_ms << "\n";
  o << "noise_std_m = " << c.mobility.trajectory.noise_std_m << "\n";
  o << "accel_std_mps2 = " << c.mobility.trajectory.accel_std_mps2 << "\n";
  o << "accel_tau_ms = " << c.mobility.trajectory.accel_tau_ms << "\n";
  o << "burst_scale = " << c.mobility.trajectory.burst_scale << "\n";
  o << "burst_start_prob = " << c.mobility.trajectory.burst_start_prob << "\n";
  o << "burst_stop_prob = " << c.mobility.trajectory.burst_stop_prob << "\n";
  o << "v_max_mps = " << c.mobility.trajectory.v_max_mps << "\n";
  o << "history_ms = " << c.mobility.history_ms << "\n";
  o << "horizons_ms = ";
  for (std::size_t i = 0; i < c.mobility.horizons_ms.size(); ++i) {
    o << (i ? "," : "") << c.mobility.horizons_ms[i];
  }
  o << "\naccuracies_m = ";
  for (std::size_t i = 0; i < c.mobility.accuracies_m.size(); ++i) {
    o << (i ? "," : "") << c.mobility.accuracies_m[i];
  }
  o << "\ntrain_samples = " << c.mobility.train_samples << "\n";
  o << "heldout_samples = " << c.mobility.heldout_samples << "\n";
  o << "epochs = " << c.mobility.train.epochs << "\n";
  o << "batch_size = " << c.mobility.train.batch_size << "\n";
  o << "learning_rate = " << c.mobility.train.learning_rate << "\n\n";

  o << "[scheduler]\n";
  o << "num_users = " << c.scheduler.env.num_users << "\n";
  o << "total_bandwidth_hz = " << c.scheduler.env.total_bandwidth_hz << "\n";
  o << "packet_bits = " << c.scheduler.env.packet_bits << "\n";
  o << "arrival_rate_pps = " << c.scheduler.env.arrival_rate_pps << "\n";
  o << "d_min_ms = " << c.scheduler.env.qos.d_min_ms << "\n";
  o << "d_max_ms = " << c.scheduler.env.qos.d_max_ms << "\n";
  o << "distances_m = ";
  for (std::size_t i = 0; i < c.scheduler.env.distances_m.size(); ++i) {
    o << (i ? "," : "") << c.scheduler.env.distances_m[i];
  }
  o << "\ntx_power_w = " << c.scheduler.env.tx_power_w << "\n";
  o << "reward_lambda = " << c.scheduler.env.reward_lambda << "\n";
  o << "jitter_mean_ms = " << c.scheduler.env.mismatch.jitter_mean_ms << "\n";
  o << "jitter_std_ms = " << c.scheduler.env.mismatch.jitter_std_ms << "\n";
  o << "jitter_max_ms = " << c.scheduler.env.mismatch.jitter_max_ms << "\n";
  o << "decode_penalty = " << c.scheduler.env.mismatch.decode_penalty << "\n";
  o << "processing_ms = " << c.scheduler.env.processing_ms << "\n";
  o << "episodes = " << c.scheduler.pretrain.episodes << "\n";
  o << "slots_per_episode = " << c.scheduler.pretrain.slots_per_episode << "\n";
  o << "warmup_slots = " << c.scheduler.pretrain.warmup_slots << "\n";
  o << "batch_size = " << c.scheduler.pretrain.batch_size << "\n";
  o << "update_every = " << c.scheduler.pretrain.update_every << "\n";
  o << "actor_lr = " << c.scheduler.pretrain.actor_lr << "\n";
  o << "critic_lr = " << c.scheduler.pretrain.critic_lr << "\n";
  o << "noise_std = " << c.scheduler.pretrain.noise_std << "\n";
  o << "discount = " << c.scheduler.pretrain.discount << "\n";
  o << "finetune_episodes = " << c.scheduler.finetune.episodes << "\n";
  o << "finetune_actor_lr = " << c.scheduler.finetune.actor_lr << "\n";
  o << "finetune_critic_lr = " << c.scheduler.finetune.critic_lr << "\n";
  o << "finetune_noise_std = " << c.scheduler.finetune.noise_std << "\n";
  o << "eval_packets = " << c.scheduler.eval_packets << "\n\n";

  o << "[assoc]\n";
  o << "ap_bandwidth_hz = " << c.assoc.params.ap_bandwidth_hz << "\n";
  o << "mec_rate_cps = " << c.assoc.params.mec_rate_cps << "\n";
  o << "train_samples = " << c.assoc.train_samples << "\n";
  o << "heldout_samples = " << c.assoc.heldout_samples << "\n";
  o << "eval_instances = " << c.assoc.eval_instances << "\n";
  o << "dominance_instances = " << c.assoc.dominance_instances << "\n";
  o << "random_feasible_per_instance = " << c.assoc.random_feasible_per_instance << "\n";
  o << "finetune_samples = " << c.assoc.finetune_samples << "\n";
  o << "epochs = " << c.assoc.train.epochs << "\n";
  o << "batch_size = " << c.assoc.train.batch_size << "\n";
  o << "learning_rate = " << c.assoc.train.learning_rate << "\n";
  o << "finetune_epochs = " << c.assoc.finetune.epochs << "\n";
  o << "finetune_learning_rate = " << c.assoc.finetune.learning_rate << "\n";
  o << "finetune_all_layers = " << (c.assoc.finetune_all_layers ? "true" : "false") << "\n\n";

  o << "[fed]\n";
  o << "cells = " << c.fed.cells << "\n";
  o << "locals_per_cell = " << c.fed.locals_per_cell << "\n";
  o << "shard_duration_ms = " << c.fed.shard_duration_ms << "\n";
  o << "samples_per_local = " << c.fed.samples_per_local << "\n";
  o << "heldout_samples = " << c.fed.heldout_samples << "\n";
  o << "epochs = " << c.fed.train.epochs << "\n";
  o << "horizon_ms = " << c.fed.horizon_ms << "\n";
  return o.str();
}

}  // namespace urllc::config
