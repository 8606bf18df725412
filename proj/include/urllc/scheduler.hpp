#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "urllc/nn.hpp"
#include "urllc/queue_sim.hpp"
#include "urllc/radio.hpp"
#include "urllc/rng.hpp"

namespace urllc::scheduler {

// Cell-level bandwidth scheduler: a deterministic actor + Q-critic pair
// allocates per-slot bandwidth shares between the users of one AP so that
// packets clear the [d_min, d_max] delivery window under finite-blocklength
// decoding. Pretraining runs in the ideal analytic environment; the
// mismatch knobs caricature a real deployment (random delivery-path jitter
// the scheduler cannot observe, and a decoder penalty on the error
// probability).

// The simulation models the post-decode processing pipeline as a fixed
// 1 ms latency; the "real" environment draws it per packet instead
// (discretized truncated Gaussian with the same mean), which the play-out
// hold cannot compensate. A decode penalty inflates the error probability
// on top.
struct MismatchConfig {
  bool enabled = false;
  double jitter_mean_ms = 1.0;
  double jitter_std_ms = 0.35;
  int jitter_max_ms = 3;
  double decode_penalty = 5.0;  // multiplies epsilon, capped at 1
};

struct SchedulerConfig {
  int num_users = 2;
  double total_bandwidth_hz = 5e6;
  double slot_ms = 1.0;
  int packet_bits = 1600;            // 200 bytes
  double arrival_rate_pps = 100.0;   // per user
  queue_sim::QosTarget qos{9, 11, 1e-5};
  std::vector<double> distances_m = {40.0, 60.0};
  double tx_power_w = 0.2;
  double noise_psd = radio::kDefaultNoisePsd;
  double reward_lambda = 0.1;  // soft penalty for unserved heads in [d_max-2, d_max]
  // Shares below this are "no transmission": a 500 kHz sliver gives a
  // 500-symbol block for 1600 payload bits, hopeless at these link budgets,
  // and the idle cliff has to sit where a sigmoid head can reach it.
  double min_share = 0.1;
  int processing_ms = 1;       // fixed pipeline latency assumed by the play-out hold
  MismatchConfig mismatch;
};

// Agent observation, normalized per user to roughly [0, 1]:
//   queue length / 10, head-of-line delay / d_max, log10(1+snr) / 4.
struct EnvState {
  std::vector<double> obs;
};

class SchedulerEnv {
 public:
  SchedulerEnv(const SchedulerConfig& cfg, std::uint64_t seed);

  int obs_dim() const { return 3 * cfg_.num_users; }
  int action_dim() const { return cfg_.num_users; }
  const SchedulerConfig& config() const { return cfg_; }

  // Observation for the upcoming slot (this slot's fading is already drawn).
  std::vector<double> observe() const;

  struct StepResult {
    double reward = 0.0;
    int packets_lost = 0;
    queue_sim::StepEvents events;  // summed over users
  };

  // Applies one slot: shares outside the simplex are clamped (counted, never
  // fatal), per-user blocklength is share * bandwidth * slot, decode success
  // is Bernoulli(1 - eps) from the analytic error probability, and queue
  // bookkeeping runs through queue_sim.
  StepResult step(std::span<const double> shares);

  std::int64_t delivered() const { return delivered_; }
  std::int64_t delay_violations() const { return delay_violations_; }
  std::int64_t decode_failures() const { return decode_failures_; }
  std::int64_t terminal_packets() const {
    return delivered_ + delay_violations_ + decode_failures_;
  }
  std::int64_t clamped_actions() const { return clamped_actions_; }

 private:
  double user_snr_fullband(int u) const;

  SchedulerConfig cfg_;
  std::vector<queue_sim::QueueState> queues_;
  std::vector<double> large_scale_;
  std::vector<double> fading_;  // fresh each slot
  std::vector<RngStream> arrival_rng_;
  std::vector<RngStream> fading_rng_;
  RngStream decode_rng_;
  RngStream jitter_rng_;
  std::int64_t delivered_ = 0;
  std::int64_t delay_violations_ = 0;
  std::int64_t decode_failures_ = 0;
  std::int64_t clamped_actions_ = 0;
};

struct AgentPair {
  // Actor emits share logits (obs_dim -> 40 -> 40 -> num_users); they map
  // onto the simplex as b_i = exp(u_i) / (1 + sum exp(u_j)), the implicit
  // unit standing for unallocated bandwidth.
  nn::MlpParams actor;
  nn::MlpParams critic;  // obs_dim + num_users -> 60 -> 60 -> 1
};

struct DrlConfig {
  std::vector<int> actor_hidden = {40, 40};
  std::vector<int> critic_hidden = {60, 60};
  int episodes = 300;
  int slots_per_episode = 1000;
  int warmup_slots = 2000;     // uniform random actions before learning
  int batch_size = 32;
  int replay_capacity = 100000;
  int update_every = 2;        // gradient step every N env slots
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double critic_momentum = 0.9;
  // No momentum on the policy by default: the deterministic-policy-gradient
  // direction changes with the critic, and momentum turns that into
  // common-mode runaway across states.
  double actor_momentum = 0.0;
  double discount = 0.95;
  double tau = 0.005;          // target-network soft update
  double noise_std = 0.08;
  double noise_clip = 0.2;
  // Behavior-policy dithering: with this probability a user's share is
  // replaced by idle (0) or by a solid allocation in [0.2, 1], half/half.
  // Additive noise alone can neither reach the idle boundary from a
  // saturated policy nor climb back out of it, so the replay must carry
  // both action modes at all times.
  double explore_dither_prob = 0.12;
  // Temporally extended exploration: occasionally hold a user idle for a
  // few slots so queues actually age and the replay covers the whole
  // head-of-line-delay range; single-slot dithering never gets past age 2.
  double hold_explore_start_prob = 0.02;
  int hold_explore_min_slots = 2;
  int hold_explore_max_slots = 12;
  // Critic burn-in: collect and fit the value function for this many slots
  // before the first policy update.
  int actor_update_delay_slots = 20000;
  // When > 0, actor updates run only in every other block of this many
  // slots, so each policy-improvement burst works against a critic that was
  // just refit on current data. Tames actor/critic co-adaptation cycles.
  int actor_alternate_block_slots = 0;
  double critic_loss_abort = 1e6;
};

struct EpisodeStats {
  double mean_reward = 0.0;
  double mean_critic_loss = 0.0;
  std::int64_t packets_lost = 0;
  std::int64_t terminal_packets = 0;
};

struct TrainingLog {
  std::vector<EpisodeStats> episodes;
};

// Deterministic policy output with optional clipped Gaussian exploration,
// squashed to the simplex (components >= 0, sum <= 1). Pass noise_std 0 and
// no stream for the pure policy.
std::vector<double> actor_act(const nn::MlpParams& actor, std::span<const double> obs,
                              double noise_std, double noise_clip = 0.2,
                              RngStream* noise_rng = nullptr);

// Off-policy replay training in the given environment (ideal when
// cfg.mismatch.enabled is false). Deterministic per (config, seed).
AgentPair pretrain(const SchedulerConfig& env_cfg, const DrlConfig& drl_cfg,
                   std::uint64_t seed, TrainingLog* log = nullptr);

// Continue training an existing agent, normally in a mismatched environment
// with reduced learning rates and exploration noise.
AgentPair fine_tune(const AgentPair& agent, const SchedulerConfig& env_cfg,
                    const DrlConfig& drl_cfg, std::uint64_t seed,
                    TrainingLog* log = nullptr);

// Noise-free evaluation over at least `min_packets` terminal packets.
// With jobs > 1, independent deterministic shards split the slot budget and
// counts reduce in shard order.
queue_sim::LossBreakdown evaluate(const nn::MlpParams& actor,
                                  const SchedulerConfig& env_cfg,
                                  std::int64_t min_packets, std::uint64_t seed,
                                  int jobs = 1);

}  // namespace urllc::scheduler
