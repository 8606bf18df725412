#include "urllc/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "urllc/errors.hpp"
#include "urllc/federated.hpp"
#include "urllc/rng.hpp"

namespace urllc::experiments {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Child-stream tags per pipeline; fixed so reports are stable.
enum : std::uint64_t {
  kMobEvalTraj = 1,
  kMobTrainTraj = 2,
  kMobDataset = 3,
  kMobHeldTraj = 4,
  kMobTrain = 5,
  kSchedPretrain = 11,
  kSchedEvalIdeal = 12,
  kSchedEvalPre = 13,
  kSchedFinetune = 14,
  kSchedEvalFt = 15,
  kAssocTrainSet = 21,
  kAssocHeldSet = 22,
  kAssocTrain = 23,
  kAssocEval55 = 24,
  kAssocEval91 = 25,
  kAssocFtSet = 26,
  kAssocFtTrain = 27,
  kAssocScratchSet = 28,
  kAssocScratchTrain = 29,
  kFedInit = 30,
  kFedShardBase = 31,
  kFedHeldout = 40,
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << text;
}

void write_json(const std::string& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

ordered_json breakdown_json(const queue_sim::LossBreakdown& b) {
  return ordered_json{{"delay_violation", b.delay_violation_prob},
                      {"decoding_error", b.decode_error_prob},
                      {"overall", b.overall},
                      {"total_packets", b.total_packets}};
}

struct GapStats {
  double mean_gap = 0.0;
  double within_5pct = 0.0;
  int instances = 0;
};

}  // namespace

ordered_json run_mobility(const config::ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const auto& mc = cfg.mobility;
  const RngStream root(cfg.seed);

  const mobility::Trajectory eval_traj =
      mobility::gen_trajectory(mc.trajectory, root.child(kMobEvalTraj).seed());

  mobility::TrajectoryConfig train_tc = mc.trajectory;
  train_tc.duration_ms = mc.train_duration_ms;
  const mobility::Trajectory train_traj =
      mobility::gen_trajectory(train_tc, root.child(kMobTrainTraj).seed());
  const mobility::Trajectory held_traj =
      mobility::gen_trajectory(train_tc, root.child(kMobHeldTraj).seed());

  const int horizon_len = 20;
  const mobility::PredictorDataset train_ds = mobility::build_predictor_dataset(
      train_traj, mc.history_ms, horizon_len, mc.train_samples,
      root.child(kMobDataset).seed());
  const mobility::PredictorDataset held_ds = mobility::build_predictor_dataset(
      held_traj, mc.history_ms, horizon_len, mc.heldout_samples,
      root.child(kMobDataset).seed() + 1);

  mobility::PredictorTrainConfig tc = mc.train;
  tc.seed = root.child(kMobTrain).seed();
  mobility::TrainLog tlog;
  const nn::MlpParams net = mobility::train_mlp_predictor(train_ds, tc, &tlog);
  const double held_mse = mobility::dataset_mse(net, held_ds);

  const auto newton_grid = mobility::newton_error_grid(eval_traj, mc.history_ms,
                                                       mc.horizons_ms, mc.accuracies_m);
  const auto mlp_grid = mobility::mlp_error_grid(net, eval_traj, mc.history_ms,
                                                 mc.horizons_ms, mc.accuracies_m);

  {
    std::ofstream csv(cfg.out_dir + "/mobility_table1.csv");
    csv.precision(17);
    csv << "predictor,horizon_ms,accuracy_m,error_prob\n";
    for (std::size_t a = 0; a < mc.accuracies_m.size(); ++a) {
      for (std::size_t h = 0; h < mc.horizons_ms.size(); ++h) {
        csv << "newton," << mc.horizons_ms[h] << ',' << mc.accuracies_m[a] << ','
            << newton_grid[h][a] << '\n';
      }
      for (std::size_t h = 0; h < mc.horizons_ms.size(); ++h) {
        csv << "mlp," << mc.horizons_ms[h] << ',' << mc.accuracies_m[a] << ','
            << mlp_grid[h][a] << '\n';
      }
    }
  }
  {
    std::ofstream csv(cfg.out_dir + "/mobility_train_log.csv");
    csv.precision(17);
    csv << "epoch,train_mse\n";
    for (std::size_t e = 0; e < tlog.epoch_mse.size(); ++e) {
      csv << e << ',' << tlog.epoch_mse[e] << '\n';
    }
  }
  nn::save_mlp(net, cfg.out_dir + "/mobility_predictor.mlp");

  ordered_json metrics;
  metrics["experiment"] = "mobility";
  metrics["seed"] = cfg.seed;
  metrics["eval_slots"] = eval_traj.length();
  metrics["train_samples"] = mc.train_samples;
  metrics["final_train_mse"] = tlog.epoch_mse.empty() ? 0.0 : tlog.epoch_mse.back();
  metrics["heldout_mse"] = held_mse;
  ordered_json table = ordered_json::array();
  for (std::size_t a = 0; a < mc.accuracies_m.size(); ++a) {
    for (std::size_t h = 0; h < mc.horizons_ms.size(); ++h) {
      table.push_back(ordered_json{{"predictor", "newton"},
                                   {"horizon_ms", mc.horizons_ms[h]},
                                   {"accuracy_m", mc.accuracies_m[a]},
                                   {"error_prob", newton_grid[h][a]}});
      table.push_back(ordered_json{{"predictor", "mlp"},
                                   {"horizon_ms", mc.horizons_ms[h]},
                                   {"accuracy_m", mc.accuracies_m[a]},
                                   {"error_prob", mlp_grid[h][a]}});
    }
  }
  metrics["table"] = table;
  write_json(cfg.out_dir + "/mobility_metrics.json", metrics);
  return metrics;
}

ordered_json run_scheduler(const config::ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const auto& sc = cfg.scheduler;
  const RngStream root(cfg.seed);

  scheduler::SchedulerConfig ideal_cfg = sc.env;
  ideal_cfg.mismatch.enabled = false;
  scheduler::SchedulerConfig mm_cfg = sc.env;
  mm_cfg.mismatch.enabled = true;

  scheduler::TrainingLog pre_log;
  const scheduler::AgentPair agent =
      scheduler::pretrain(ideal_cfg, sc.pretrain, root.child(kSchedPretrain).seed(), &pre_log);
  nn::save_mlp(agent.actor, cfg.out_dir + "/scheduler_actor.mlp");
  nn::save_mlp(agent.critic, cfg.out_dir + "/scheduler_critic.mlp");

  const queue_sim::LossBreakdown ideal_eval = scheduler::evaluate(
      agent.actor, ideal_cfg, sc.eval_packets, root.child(kSchedEvalIdeal).seed(), cfg.jobs);
  const queue_sim::LossBreakdown pre_mm = scheduler::evaluate(
      agent.actor, mm_cfg, sc.eval_packets, root.child(kSchedEvalPre).seed(), cfg.jobs);

  scheduler::TrainingLog ft_log;
  const scheduler::AgentPair tuned = scheduler::fine_tune(
      agent, mm_cfg, sc.finetune, root.child(kSchedFinetune).seed(), &ft_log);
  nn::save_mlp(tuned.actor, cfg.out_dir + "/scheduler_actor_finetuned.mlp");

  const queue_sim::LossBreakdown ft_mm = scheduler::evaluate(
      tuned.actor, mm_cfg, sc.eval_packets, root.child(kSchedEvalFt).seed(), cfg.jobs);

  {
    std::ofstream csv(cfg.out_dir + "/scheduler_train_log.csv");
    csv.precision(17);
    csv << "phase,episode,mean_reward,mean_critic_loss,packets_lost,terminal_packets\n";
    for (std::size_t e = 0; e < pre_log.episodes.size(); ++e) {
      const auto& st = pre_log.episodes[e];
      csv << "pretrain," << e << ',' << st.mean_reward << ',' << st.mean_critic_loss
          << ',' << st.packets_lost << ',' << st.terminal_packets << '\n';
    }
    for (std::size_t e = 0; e < ft_log.episodes.size(); ++e) {
      const auto& st = ft_log.episodes[e];
      csv << "finetune," << e << ',' << st.mean_reward << ',' << st.mean_critic_loss
          << ',' << st.packets_lost << ',' << st.terminal_packets << '\n';
    }
  }

  ordered_json table2;
  table2["ideal"] = breakdown_json(ideal_eval);
  table2["pretrained_mismatch"] = breakdown_json(pre_mm);
  table2["finetuned_mismatch"] = breakdown_json(ft_mm);
  write_json(cfg.out_dir + "/scheduler_table2.json", table2);

  ordered_json metrics;
  metrics["experiment"] = "scheduler";
  metrics["seed"] = cfg.seed;
  metrics["eval_packets_min"] = sc.eval_packets;
  metrics["table2"] = table2;
  write_json(cfg.out_dir + "/scheduler_metrics.json", metrics);
  return metrics;
}

namespace {

struct AssocEvalRow {
  double obj_optimal = 0.0;
  double obj_dnn = 0.0;
  double obj_highest_snr = 0.0;
  bool optimal_feasible = true;
};

GapStats gap_stats(const std::vector<double>& opt, const std::vector<double>& other) {
  GapStats g;
  double sum = 0.0;
  int within = 0;
  for (std::size_t i = 0; i < opt.size(); ++i) {
    const double gap = (other[i] - opt[i]) / opt[i];
    sum += gap;
    if (other[i] <= 1.05 * opt[i]) ++within;
  }
  g.instances = static_cast<int>(opt.size());
  g.mean_gap = g.instances > 0 ? sum / g.instances : 0.0;
  g.within_5pct = g.instances > 0 ? static_cast<double>(within) / g.instances : 0.0;
  return g;
}

}  // namespace

ordered_json run_assoc(const config::ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const auto& ac = cfg.assoc;
  const RngStream root(cfg.seed);

  const assoc::Dataset train_ds = assoc::build_dataset(
      ac.train_samples, assoc::RegionRatio::k5to5, root.child(kAssocTrainSet).seed(), ac.params);
  const assoc::Dataset held_ds = assoc::build_dataset(
      ac.heldout_samples, assoc::RegionRatio::k5to5, root.child(kAssocHeldSet).seed(), ac.params);

  assoc::AssocTrainConfig tc = ac.train;
  tc.seed = root.child(kAssocTrain).seed();
  assoc::AssocTrainLog tlog;
  const nn::MlpParams net = assoc::train_assoc_dnn(train_ds, tc, &tlog);
  const double held_acc = assoc::decision_accuracy(net, held_ds);
  nn::save_mlp(net, cfg.out_dir + "/assoc_dnn.mlp");

  // Fresh 5:5 trials: optimal vs DNN vs highest-gain baseline.
  std::vector<double> opt55, dnn55, snr55;
  {
    std::ofstream csv(cfg.out_dir + "/assoc_trials_55.csv");
    csv.precision(17);
    csv << "trial,objective_optimal,objective_dnn,objective_highest_snr\n";
    const RngStream eval_root = root.child(kAssocEval55);
    for (int i = 0; i < ac.eval_instances; ++i) {
      const assoc::AssocInstance inst = assoc::gen_instance(
          assoc::RegionRatio::k5to5, eval_root.child(static_cast<std::uint64_t>(i)).seed(),
          ac.params);
      const assoc::OptimalResult opt = assoc::exhaustive_optimal(inst);
      if (!opt.report.feasible) continue;
      const assoc::Assignment dnn_a = assoc::infer_assignment(net, inst);
      const assoc::EnergyReport dnn_rep = assoc::evaluate_assignment(inst, dnn_a);
      const assoc::EnergyReport snr_rep =
          assoc::evaluate_assignment(inst, assoc::highest_snr_baseline(inst));
      opt55.push_back(opt.report.objective);
      dnn55.push_back(dnn_rep.objective);
      snr55.push_back(snr_rep.objective);
      csv << i << ',' << opt.report.objective << ',' << dnn_rep.objective << ','
          << snr_rep.objective << '\n';
    }
  }
  const GapStats g55 = gap_stats(opt55, dnn55);
  const GapStats g55_snr = gap_stats(opt55, snr55);

  // Distribution shift to 9:1: unadapted net, 500-sample fine-tune, and a
  // from-scratch reference net trained on a full 9:1 dataset.
  const assoc::Dataset ft_ds = assoc::build_dataset(
      ac.finetune_samples, assoc::RegionRatio::k9to1, root.child(kAssocFtSet).seed(), ac.params);
  assoc::AssocTrainConfig ftc = ac.finetune;
  ftc.seed = root.child(kAssocFtTrain).seed();
  const nn::MlpParams tuned = assoc::fine_tune_on_shift(
      net, ft_ds,
      ac.finetune_all_layers ? assoc::FineTuneMode::kAllLayers : assoc::FineTuneMode::kLastK,
      ftc);

  const assoc::Dataset scratch_ds = assoc::build_dataset(
      ac.train_samples, assoc::RegionRatio::k9to1, root.child(kAssocScratchSet).seed(), ac.params);
  assoc::AssocTrainConfig stc = ac.train;
  stc.seed = root.child(kAssocScratchTrain).seed();
  const nn::MlpParams scratch = assoc::train_assoc_dnn(scratch_ds, stc);

  std::vector<double> opt91, dnn91, ft91, scratch91, snr91;
  {
    std::ofstream csv(cfg.out_dir + "/assoc_trials_91.csv");
    csv.precision(17);
    csv << "trial,objective_optimal,objective_dnn_unadapted,objective_dnn_finetuned,"
           "objective_dnn_scratch,objective_highest_snr\n";
    const RngStream eval_root = root.child(kAssocEval91);
    for (int i = 0; i < ac.eval_instances; ++i) {
      const assoc::AssocInstance inst = assoc::gen_instance(
          assoc::RegionRatio::k9to1, eval_root.child(static_cast<std::uint64_t>(i)).seed(),
          ac.params);
      const assoc::OptimalResult opt = assoc::exhaustive_optimal(inst);
      if (!opt.report.feasible) continue;
      const double o_un = assoc::evaluate_assignment(inst, assoc::infer_assignment(net, inst)).objective;
      const double o_ft = assoc::evaluate_assignment(inst, assoc::infer_assignment(tuned, inst)).objective;
      const double o_sc = assoc::evaluate_assignment(inst, assoc::infer_assignment(scratch, inst)).objective;
      const double o_snr =
          assoc::evaluate_assignment(inst, assoc::highest_snr_baseline(inst)).objective;
      opt91.push_back(opt.report.objective);
      dnn91.push_back(o_un);
      ft91.push_back(o_ft);
      scratch91.push_back(o_sc);
      snr91.push_back(o_snr);
      csv << i << ',' << opt.report.objective << ',' << o_un << ',' << o_ft << ','
          << o_sc << ',' << o_snr << '\n';
    }
  }
  const GapStats g91_un = gap_stats(opt91, dnn91);
  const GapStats g91_ft = gap_stats(opt91, ft91);
  const GapStats g91_sc = gap_stats(opt91, scratch91);
  const GapStats g91_snr = gap_stats(opt91, snr91);

  {
    std::ofstream csv(cfg.out_dir + "/assoc_train_log.csv");
    csv.precision(17);
    csv << "epoch,mean_cross_entropy,train_accuracy\n";
    for (std::size_t e = 0; e < tlog.epoch_loss.size(); ++e) {
      csv << e << ',' << tlog.epoch_loss[e] << ',' << tlog.epoch_accuracy[e] << '\n';
    }
  }
  nn::save_mlp(tuned, cfg.out_dir + "/assoc_dnn_finetuned.mlp");

  ordered_json metrics;
  metrics["experiment"] = "assoc";
  metrics["seed"] = cfg.seed;
  metrics["heldout_decision_accuracy"] = held_acc;
  metrics["fresh_55"] = ordered_json{{"instances", g55.instances},
                                     {"dnn_mean_gap", g55.mean_gap},
                                     {"dnn_within_5pct", g55.within_5pct},
                                     {"highest_snr_mean_gap", g55_snr.mean_gap}};
  metrics["shift_91"] = ordered_json{{"instances", g91_un.instances},
                                     {"dnn_unadapted_mean_gap", g91_un.mean_gap},
                                     {"dnn_finetuned_mean_gap", g91_ft.mean_gap},
                                     {"dnn_scratch_mean_gap", g91_sc.mean_gap},
                                     {"highest_snr_mean_gap", g91_snr.mean_gap},
                                     {"finetuned_within_5pct", g91_ft.within_5pct}};
  write_json(cfg.out_dir + "/assoc_metrics.json", metrics);
  return metrics;
}

ordered_json run_fed(const config::ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const auto& fc = cfg.fed;
  const RngStream root(cfg.seed);

  mobility::TrajectoryConfig shard_tc = cfg.mobility.trajectory;
  shard_tc.duration_ms = fc.shard_duration_ms;

  // Common initialization: parameter averaging only makes sense when all
  // locals start from one shared parameter vector.
  const int history = cfg.mobility.history_ms;
  const int horizon = fc.horizon_ms;
  std::vector<int> sizes{history * 3};
  for (int h : fc.hidden) sizes.push_back(h);
  sizes.push_back(horizon * 3);
  const nn::MlpParams init = nn::mlp_init(sizes, nn::Activation::kTanh,
                                          nn::Activation::kIdentity,
                                          root.child(kFedInit).seed());

  const mobility::Trajectory held_traj =
      mobility::gen_trajectory(shard_tc, root.child(kFedHeldout).seed());
  const mobility::PredictorDataset held_ds = mobility::build_predictor_dataset(
      held_traj, history, horizon, fc.heldout_samples, root.child(kFedHeldout).seed() + 1);

  std::vector<federated::ModelSet> cells(static_cast<std::size_t>(fc.cells));
  std::vector<double> local_mses;
  int shard_idx = 0;
  for (int cell = 0; cell < fc.cells; ++cell) {
    for (int local = 0; local < fc.locals_per_cell; ++local, ++shard_idx) {
      const std::uint64_t shard_seed =
          root.child(kFedShardBase + static_cast<std::uint64_t>(shard_idx)).seed();
      const mobility::Trajectory traj = mobility::gen_trajectory(shard_tc, shard_seed);
      const int samples = fc.samples_per_local + 400 * local;  // uneven shards
      const mobility::PredictorDataset ds = mobility::build_predictor_dataset(
          traj, history, horizon, samples, shard_seed + 1);

      mobility::PredictorTrainConfig tc = fc.train;
      tc.hidden = fc.hidden;
      tc.seed = shard_seed + 2;
      // Same init for every local: clone then train on the local shard.
      nn::MlpParams model = init;
      {
        nn::SgdMomentum opt(model, tc.learning_rate, tc.momentum);
        const nn::FreezeMask mask = nn::FreezeMask::all_trainable(model.num_weight_layers());
        RngStream shuffle_rng = RngStream(tc.seed).child(0x736875ULL);
        std::vector<std::size_t> order(ds.inputs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (int epoch = 0; epoch < tc.epochs; ++epoch) {
          for (std::size_t i = order.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform01() *
                                                    static_cast<double>(i + 1));
            std::swap(order[i], order[j]);
          }
          std::size_t done = 0;
          while (done < order.size()) {
            const std::size_t batch =
                std::min<std::size_t>(static_cast<std::size_t>(tc.batch_size),
                                      order.size() - done);
            nn::Gradients acc = nn::zero_gradients(model);
            for (std::size_t b = 0; b < batch; ++b) {
              const std::size_t idx = order[done + b];
              const std::vector<double> pred = nn::forward(model, ds.inputs[idx]);
              const std::vector<double> g = nn::mse_output_grad(pred, ds.targets[idx]);
              const nn::BackwardResult back = nn::backward(model, ds.inputs[idx], g);
              for (std::size_t l = 0; l < acc.weights.size(); ++l) {
                for (std::size_t i2 = 0; i2 < acc.weights[l].size(); ++i2) {
                  acc.weights[l][i2] += back.grads.weights[l][i2] / static_cast<double>(batch);
                }
                for (std::size_t i2 = 0; i2 < acc.biases[l].size(); ++i2) {
                  acc.biases[l][i2] += back.grads.biases[l][i2] / static_cast<double>(batch);
                }
              }
            }
            opt.step(model, acc, mask);
            done += batch;
          }
          opt.set_learning_rate(opt.learning_rate() * tc.lr_decay);
        }
      }
      local_mses.push_back(mobility::dataset_mse(model, held_ds));
      cells[static_cast<std::size_t>(cell)].models.push_back(std::move(model));
      cells[static_cast<std::size_t>(cell)].sample_counts.push_back(samples);
    }
  }

  const federated::HierarchicalResult agg = federated::hierarchical_round(cells);
  nn::save_mlp(agg.global_model, cfg.out_dir + "/fed_global.mlp");
  for (std::size_t c = 0; c < agg.edge_models.size(); ++c) {
    nn::save_mlp(agg.edge_models[c],
                 cfg.out_dir + "/fed_edge_" + std::to_string(c) + ".mlp");
  }

  std::vector<double> edge_mses;
  for (const auto& em : agg.edge_models) {
    edge_mses.push_back(mobility::dataset_mse(em, held_ds));
  }
  const double global_mse = mobility::dataset_mse(agg.global_model, held_ds);
  double mean_local = 0.0;
  for (double m : local_mses) mean_local += m;
  mean_local /= static_cast<double>(local_mses.size());

  ordered_json metrics;
  metrics["experiment"] = "fed";
  metrics["seed"] = cfg.seed;
  metrics["local_heldout_mse"] = local_mses;
  metrics["edge_heldout_mse"] = edge_mses;
  metrics["global_heldout_mse"] = global_mse;
  metrics["mean_local_heldout_mse"] = mean_local;
  write_json(cfg.out_dir + "/fed_metrics.json", metrics);
  return metrics;
}

ordered_json run_all(const config::ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  ordered_json all;
  all["mobility"] = run_mobility(cfg);
  all["scheduler"] = run_scheduler(cfg);
  all["assoc"] = run_assoc(cfg);
  all["fed"] = run_fed(cfg);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Plain-text summary mirroring the table shapes.
  std::ostringstream s;
  s.precision(6);
  s << "Prediction error probability\n";
  for (const auto& row : all["mobility"]["table"]) {
    s << "  " << row["predictor"].get<std::string>() << "  horizon "
      << row["horizon_ms"] << " ms  accuracy " << row["accuracy_m"].get<double>()
      << " m  ->  " << row["error_prob"].get<double>() << "\n";
  }
  s << "\nScheduler packet loss (delay / decode / overall)\n";
  for (const char* k : {"ideal", "pretrained_mismatch", "finetuned_mismatch"}) {
    const auto& row = all["scheduler"]["table2"][k];
    s << "  " << k << ": " << row["delay_violation"].get<double>() << " / "
      << row["decoding_error"].get<double>() << " / " << row["overall"].get<double>()
      << "\n";
  }
  s << "\nUser association mean optimality gap\n";
  s << "  5:5  dnn " << all["assoc"]["fresh_55"]["dnn_mean_gap"].get<double>()
    << "  highest-snr " << all["assoc"]["fresh_55"]["highest_snr_mean_gap"].get<double>()
    << "\n";
  s << "  9:1  unadapted " << all["assoc"]["shift_91"]["dnn_unadapted_mean_gap"].get<double>()
    << "  finetuned " << all["assoc"]["shift_91"]["dnn_finetuned_mean_gap"].get<double>()
    << "  scratch " << all["assoc"]["shift_91"]["dnn_scratch_mean_gap"].get<double>() << "\n";
  s << "\nFederated heldout MSE: global "
    << all["fed"]["global_heldout_mse"].get<double>() << " vs mean local "
    << all["fed"]["mean_local_heldout_mse"].get<double>() << "\n";
  write_text(cfg.out_dir + "/summary.txt", s.str());

  ordered_json report;
  report["config"] = config::config_echo(cfg);
  report["wall_clock_s"] = wall_s;
  write_json(cfg.out_dir + "/run_report.json", report);
  return all;
}

}  // namespace urllc::experiments
