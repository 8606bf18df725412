#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "urllc/assoc.hpp"
#include "urllc/config.hpp"
#include "urllc/errors.hpp"
#include "urllc/experiments.hpp"
#include "urllc/federated.hpp"
#include "urllc/mobility.hpp"
#include "urllc/scheduler.hpp"

namespace {

using urllc::config::ExperimentConfig;

// Exit codes: 0 ok, 2 configuration problem, 3 runtime failure.
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Config file (key = value sections)");
  cmd->add_option("--seed", o.seed, "Master seed")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--jobs", o.jobs, "Worker threads for evaluation shards");
}

ExperimentConfig resolve(const CommonOpts& o) {
  ExperimentConfig cfg = o.config_path.empty()
                             ? urllc::config::default_config()
                             : urllc::config::validate_config(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.jobs > 0) {
    cfg.jobs = o.jobs;
  } else if (const char* env = std::getenv("URLLC_LAB_JOBS")) {
    cfg.jobs = std::max(1, std::atoi(env));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urllc-lab: URLLC learning toolkit experiments"};
  app.require_subcommand(1);

  CommonOpts mob_opts, sch_opts, asc_opts, fed_opts, all_opts;

  CLI::App* mob = app.add_subcommand("mobility", "Mobility prediction experiment");
  add_common(mob, mob_opts);
  std::string mob_kind;
  int mob_horizon = 0;
  double mob_accuracy = 0.0;
  mob->add_option("--kind", mob_kind, "Trajectory kind: const_accel|smooth_random|sinusoid");
  mob->add_option("--horizon", mob_horizon, "Single prediction horizon (ms)");
  mob->add_option("--accuracy", mob_accuracy, "Single accuracy requirement (m)");

  CLI::App* sch = app.add_subcommand("scheduler", "DRL scheduler experiment");
  add_common(sch, sch_opts);
  std::string sch_phase = "all";
  std::string agent_in, agent_out;
  sch->add_option("--phase", sch_phase, "pretrain|evaluate|finetune|all");
  sch->add_option("--agent-in", agent_in, "Actor model file to load (evaluate/finetune)");
  sch->add_option("--agent-out", agent_out, "Where to store the trained actor");

  CLI::App* asc = app.add_subcommand("assoc", "User association experiment");
  add_common(asc, asc_opts);
  std::string asc_phase = "all";
  std::string asc_ratio = "5:5";
  asc->add_option("--phase", asc_phase, "dataset|train|eval|shift|all");
  asc->add_option("--ratio", asc_ratio, "Region ratio: 5:5 or 9:1");

  CLI::App* fed = app.add_subcommand("fed", "Hierarchical federated averaging demo");
  add_common(fed, fed_opts);
  std::string fed_cells, fed_counts, fed_out_model;
  fed->add_option("--cells", fed_cells, "Comma-separated directories of local .mlp models");
  fed->add_option("--counts", fed_counts, "File with one sample count per model");
  fed->add_option("--out-model", fed_out_model, "Output path for the aggregated model");

  CLI::App* all = app.add_subcommand("all", "Run every experiment");
  add_common(all, all_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mob->parsed()) {
      ExperimentConfig cfg = resolve(mob_opts);
      if (!mob_kind.empty()) {
        if (mob_kind == "const_accel") {
          cfg.mobility.trajectory.kind = urllc::mobility::TrajectoryKind::kConstAccel;
        } else if (mob_kind == "smooth_random") {
          cfg.mobility.trajectory.kind = urllc::mobility::TrajectoryKind::kSmoothRandom;
        } else if (mob_kind == "sinusoid") {
          cfg.mobility.trajectory.kind = urllc::mobility::TrajectoryKind::kSinusoid;
        } else {
          throw urllc::ConfigError("unknown trajectory kind: " + mob_kind);
        }
      }
      if (mob_horizon > 0) cfg.mobility.horizons_ms = {mob_horizon};
      if (mob_accuracy > 0.0) cfg.mobility.accuracies_m = {mob_accuracy};
      urllc::experiments::run_mobility(cfg);
    } else if (sch->parsed()) {
      ExperimentConfig cfg = resolve(sch_opts);
      if (sch_phase == "all") {
        urllc::experiments::run_scheduler(cfg);
      } else if (sch_phase == "pretrain") {
        urllc::scheduler::SchedulerConfig ideal = cfg.scheduler.env;
        ideal.mismatch.enabled = false;
        const auto agent = urllc::scheduler::pretrain(
            ideal, cfg.scheduler.pretrain, urllc::RngStream(cfg.seed).child(11).seed());
        const std::string out =
            agent_out.empty() ? cfg.out_dir + "/scheduler_actor.mlp" : agent_out;
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        urllc::nn::save_mlp(agent.actor, out);
        std::cout << "actor written to " << out << "\n";
      } else if (sch_phase == "evaluate") {
        if (agent_in.empty()) throw urllc::ConfigError("--agent-in required for evaluate");
        const urllc::nn::MlpParams actor = urllc::nn::load_mlp(agent_in);
        urllc::scheduler::SchedulerConfig env = cfg.scheduler.env;
        env.mismatch.enabled = false;
        const auto b = urllc::scheduler::evaluate(
            actor, env, cfg.scheduler.eval_packets,
            urllc::RngStream(cfg.seed).child(12).seed(), cfg.jobs);
        std::cout << "delay_violation " << b.delay_violation_prob << " decoding_error "
                  << b.decode_error_prob << " overall " << b.overall << "\n";
      } else if (sch_phase == "finetune") {
        if (agent_in.empty()) throw urllc::ConfigError("--agent-in required for finetune");
        throw urllc::ConfigError(
            "finetune needs the critic as well; run `scheduler` without --phase to "
            "execute the full pretrain/evaluate/finetune pipeline");
      } else {
        throw urllc::ConfigError("unknown scheduler phase: " + sch_phase);
      }
    } else if (asc->parsed()) {
      ExperimentConfig cfg = resolve(asc_opts);
      if (asc_ratio != "5:5" && asc_ratio != "9:1") {
        throw urllc::ConfigError("ratio must be 5:5 or 9:1, got " + asc_ratio);
      }
      if (asc_phase == "dataset") {
        const auto ratio = asc_ratio == "5:5" ? urllc::assoc::RegionRatio::k5to5
                                              : urllc::assoc::RegionRatio::k9to1;
        const auto ds = urllc::assoc::build_dataset(
            cfg.assoc.train_samples, ratio,
            urllc::RngStream(cfg.seed).child(21).seed(), cfg.assoc.params);
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        std::ofstream csv(cfg.out_dir + "/assoc_dataset.csv");
        csv.precision(17);
        for (int f = 0; f < 30; ++f) csv << "f" << f << ',';
        for (int l = 0; l < 10; ++l) csv << "label" << l << (l == 9 ? '\n' : ',');
        for (std::size_t i = 0; i < ds.features.size(); ++i) {
          for (double v : ds.features[i]) csv << v << ',';
          for (std::size_t l = 0; l < ds.labels[i].size(); ++l) {
            csv << ds.labels[i][l] << (l + 1 == ds.labels[i].size() ? '\n' : ',');
          }
        }
        std::cout << ds.features.size() << " samples written\n";
      } else {
        urllc::experiments::run_assoc(cfg);
      }
    } else if (fed->parsed()) {
      ExperimentConfig cfg = resolve(fed_opts);
      if (fed_cells.empty()) {
        urllc::experiments::run_fed(cfg);
      } else {
        // Aggregate externally trained models: --cells dir1,dir2 --counts file.
        std::vector<urllc::federated::ModelSet> cells;
        std::ifstream counts_f(fed_counts);
        if (!counts_f) throw urllc::ConfigError("cannot open counts file: " + fed_counts);
        std::stringstream ss(fed_cells);
        std::string dir;
        while (std::getline(ss, dir, ',')) {
          urllc::federated::ModelSet set;
          std::vector<std::filesystem::path> paths;
          for (const auto& e : std::filesystem::directory_iterator(dir)) {
            if (e.path().extension() == ".mlp") paths.push_back(e.path());
          }
          std::sort(paths.begin(), paths.end());
          for (const auto& p : paths) {
            set.models.push_back(urllc::nn::load_mlp(p.string()));
            std::int64_t n = 0;
            if (!(counts_f >> n)) {
              throw urllc::ConfigError("counts file shorter than model list");
            }
            set.sample_counts.push_back(n);
          }
          if (set.models.empty()) throw urllc::ConfigError("no .mlp models in " + dir);
          cells.push_back(std::move(set));
        }
        const auto agg = urllc::federated::hierarchical_round(cells);
        const std::string out =
            fed_out_model.empty() ? cfg.out_dir + "/fed_global.mlp" : fed_out_model;
        urllc::nn::save_mlp(agg.global_model, out);
        std::cout << "global model written to " << out << "\n";
      }
    } else if (all->parsed()) {
      urllc::experiments::run_all(resolve(all_opts));
    }
  } catch (const urllc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
