#include "urllc/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "urllc/errors.hpp"

namespace urllc::scheduler {

namespace {

// Stream tags for the per-seed rng tree.
constexpr std::uint64_t kTagArrivals = 0x100;
constexpr std::uint64_t kTagFading = 0x200;
constexpr std::uint64_t kTagDecode = 0x301;
constexpr std::uint64_t kTagJitter = 0x302;
constexpr std::uint64_t kTagWarmup = 0x400;
constexpr std::uint64_t kTagNoise = 0x401;
constexpr std::uint64_t kTagReplay = 0x402;
constexpr std::uint64_t kTagEnv = 0x500;
constexpr std::uint64_t kTagInitActor = 0x600;
constexpr std::uint64_t kTagInitCritic = 0x601;

void squash_to_simplex(std::vector<double>& shares) {
  double sum = 0.0;
  for (double& s : shares) {
    s = std::clamp(s, 0.0, 1.0);
    sum += s;
  }
  if (sum > 1.0) {
    for (double& s : shares) s /= sum;
  }
}

// Logistic simplex link with an implicit idle logit at zero:
//   b_i = exp(u_i) / (1 + sum_j exp(u_j)).
// Shares stay strictly inside the simplex, so unlike clamp-and-renormalize
// the map never pins the policy to the sum = 1 boundary where the
// common-mode (serve less / serve more) gradient direction dies.
std::vector<double> simplex_map(std::span<const double> logits) {
  double m = 0.0;
  for (double u : logits) m = std::max(m, u);
  double denom = std::exp(-m);
  std::vector<double> b(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    b[i] = std::exp(logits[i] - m);
    denom += b[i];
  }
  for (double& v : b) v /= denom;
  return b;
}

// dQ/du given dQ/db at b = simplex_map(u): softmax-style Jacobian.
std::vector<double> simplex_map_backward(const std::vector<double>& b,
                                         const std::vector<double>& grad_b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) dot += grad_b[i] * b[i];
  std::vector<double> g(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) g[i] = b[i] * (grad_b[i] - dot);
  return g;
}

}  // namespace

SchedulerEnv::SchedulerEnv(const SchedulerConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      decode_rng_(RngStream(seed).child(kTagDecode)),
      jitter_rng_(RngStream(seed).child(kTagJitter)) {
  if (static_cast<int>(cfg_.distances_m.size()) != cfg_.num_users) {
    throw ConfigError("scheduler env: one distance per user required");
  }
  const RngStream root(seed);
  queues_.resize(static_cast<std::size_t>(cfg_.num_users));
  for (int u = 0; u < cfg_.num_users; ++u) {
    large_scale_.push_back(radio::large_scale_gain(cfg_.distances_m[static_cast<std::size_t>(u)]));
    arrival_rng_.push_back(root.child(kTagArrivals + static_cast<std::uint64_t>(u)));
    fading_rng_.push_back(root.child(kTagFading + static_cast<std::uint64_t>(u)));
  }
  fading_.resize(static_cast<std::size_t>(cfg_.num_users));
  for (int u = 0; u < cfg_.num_users; ++u) {
    fading_[static_cast<std::size_t>(u)] =
        radio::sample_small_scale(fading_rng_[static_cast<std::size_t>(u)]);
  }
}

double SchedulerEnv::user_snr_fullband(int u) const {
  return cfg_.tx_power_w * large_scale_[static_cast<std::size_t>(u)] *
         fading_[static_cast<std::size_t>(u)] /
         (cfg_.noise_psd * cfg_.total_bandwidth_hz);
}

std::vector<double> SchedulerEnv::observe() const {
  // Per user: queue length / 10, head-of-line delay squashed around the
  // service window, log10(1+snr)/4. The delay feature is a monotone
  // normalization centered 1.5 ms short of d_min with 2.5 ms half-width:
  // ages far below the window all map to -1, and the range where service
  // timing actually matters spans most of [-1, 1].
  std::vector<double> obs;
  obs.reserve(static_cast<std::size_t>(obs_dim()));
  const double center = static_cast<double>(cfg_.qos.d_min_ms) - 1.5;
  for (int u = 0; u < cfg_.num_users; ++u) {
    const auto& q = queues_[static_cast<std::size_t>(u)];
    obs.push_back(static_cast<double>(q.length()) / 10.0);
    obs.push_back(q.empty() ? -1.0
                            : std::clamp((q.hol_delay_ms() - center) / 2.5, -1.0, 1.0));
    obs.push_back(std::log10(1.0 + user_snr_fullband(u)) / 4.0);
  }
  return obs;
}

SchedulerEnv::StepResult SchedulerEnv::step(std::span<const double> shares_in) {
  if (static_cast<int>(shares_in.size()) != cfg_.num_users) {
    throw ShapeError("scheduler env: action size != num_users");
  }
  std::vector<double> shares(shares_in.begin(), shares_in.end());
  {
    double sum = 0.0;
    bool bad = false;
    for (double s : shares) {
      if (!(s >= 0.0 && s <= 1.0)) bad = true;
      sum += std::isfinite(s) ? s : 0.0;
    }
    if (bad || sum > 1.0 + 1e-12) {
      ++clamped_actions_;
      for (double& s : shares) s = std::isfinite(s) ? s : 0.0;
      squash_to_simplex(shares);
    }
  }

  StepResult result;
  std::vector<bool> served(static_cast<std::size_t>(cfg_.num_users), false);
  for (int u = 0; u < cfg_.num_users; ++u) {
    auto& queue = queues_[static_cast<std::size_t>(u)];
    const int arrivals = queue_sim::poisson_arrivals(
        cfg_.arrival_rate_pps, cfg_.slot_ms, arrival_rng_[static_cast<std::size_t>(u)]);

    // Will the queue hold a servable packet once this slot's expiry sweep and
    // arrivals are in? Heads older than d_max at the new slot are dropped by
    // the sweep, so count the survivors.
    bool has_head = arrivals > 0;
    if (!has_head) {
      const std::int64_t next_slot = queue.current_slot() + 1;
      for (const auto& p : queue.packets()) {
        if (next_slot - p.arrival_slot <= cfg_.qos.d_max_ms) {
          has_head = true;
          break;
        }
      }
    }

    const double share = shares[static_cast<std::size_t>(u)];
    const bool transmit = share > cfg_.min_share && has_head;

    queue_sim::TransmitDecision decision;
    decision.transmit = transmit;
    if (transmit) {
      const int blocklength = std::max(
          1, static_cast<int>(share * cfg_.total_bandwidth_hz * cfg_.slot_ms / 1000.0));
      const double snr = user_snr_fullband(u) / share;  // noise scales with the share
      double eps = radio::decoding_error_prob(
          snr, radio::CodingConfig{blocklength, cfg_.packet_bits});
      if (cfg_.mismatch.enabled) {
        eps = std::min(1.0, eps * cfg_.mismatch.decode_penalty);
      }
      decision.decode_success = decode_rng_.uniform01() >= eps;
      // The play-out hold targets d_min assuming the nominal pipeline
      // latency. Ideal environment: the latency is exactly nominal. Real
      // environment: it is random and the scheduler cannot observe it.
      decision.hold_until_age_ms = cfg_.qos.d_min_ms - cfg_.processing_ms;
      decision.extra_delay_ms = cfg_.processing_ms;
      if (cfg_.mismatch.enabled && decision.decode_success) {
        const double j = jitter_rng_.gaussian(cfg_.mismatch.jitter_mean_ms,
                                              cfg_.mismatch.jitter_std_ms);
        decision.extra_delay_ms = static_cast<int>(std::lround(
            std::clamp(j, 0.0, static_cast<double>(cfg_.mismatch.jitter_max_ms))));
      }
      served[static_cast<std::size_t>(u)] = true;
    }

    const queue_sim::StepEvents ev = queue.step(arrivals, decision, cfg_.qos);
    result.events.delivered += ev.delivered;
    result.events.delay_violations += ev.delay_violations;
    result.events.decode_failures += ev.decode_failures;
  }

  delivered_ += result.events.delivered;
  delay_violations_ += result.events.delay_violations;
  decode_failures_ += result.events.decode_failures;
  result.packets_lost = result.events.delay_violations + result.events.decode_failures;

  // Reward: packet losses plus a soft shaping term when an unserved head
  // sits inside [d_max - 2, d_max].
  int late_unserved = 0;
  for (int u = 0; u < cfg_.num_users; ++u) {
    const auto& q = queues_[static_cast<std::size_t>(u)];
    if (!served[static_cast<std::size_t>(u)] && !q.empty() &&
        q.hol_delay_ms() >= cfg_.qos.d_max_ms - 2) {
      ++late_unserved;
    }
  }
  result.reward = -static_cast<double>(result.packets_lost) -
                  cfg_.reward_lambda * static_cast<double>(late_unserved);

  // Fresh fading for the next slot.
  for (int u = 0; u < cfg_.num_users; ++u) {
    fading_[static_cast<std::size_t>(u)] =
        radio::sample_small_scale(fading_rng_[static_cast<std::size_t>(u)]);
  }
  return result;
}

std::vector<double> actor_act(const nn::MlpParams& actor, std::span<const double> obs,
                              double noise_std, double noise_clip, RngStream* noise_rng) {
  std::vector<double> shares = simplex_map(nn::forward(actor, obs));
  if (noise_std > 0.0 && noise_rng != nullptr) {
    for (double& s : shares) {
      const double n = std::clamp(noise_rng->gaussian(0.0, noise_std), -noise_clip, noise_clip);
      s += n;
    }
    squash_to_simplex(shares);
  }
  return shares;
}

namespace {

struct Replay {
  explicit Replay(int capacity, int obs_dim, int act_dim)
      : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
    obs_.resize(static_cast<std::size_t>(capacity) * obs_dim);
    act_.resize(static_cast<std::size_t>(capacity) * act_dim);
    rew_.resize(static_cast<std::size_t>(capacity));
    next_obs_.resize(static_cast<std::size_t>(capacity) * obs_dim);
  }

  void push(std::span<const double> s, std::span<const double> a, double r,
            std::span<const double> s2) {
    const std::size_t row = static_cast<std::size_t>(head_);
    std::copy(s.begin(), s.end(), obs_.begin() + row * obs_dim_);
    std::copy(a.begin(), a.end(), act_.begin() + row * act_dim_);
    rew_[row] = r;
    std::copy(s2.begin(), s2.end(), next_obs_.begin() + row * obs_dim_);
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
  }

  int size() const { return size_; }
  std::span<const double> obs(int i) const {
    return {obs_.data() + static_cast<std::size_t>(i) * obs_dim_,
            static_cast<std::size_t>(obs_dim_)};
  }
  std::span<const double> act(int i) const {
    return {act_.data() + static_cast<std::size_t>(i) * act_dim_,
            static_cast<std::size_t>(act_dim_)};
  }
  double reward(int i) const { return rew_[static_cast<std::size_t>(i)]; }
  std::span<const double> next_obs(int i) const {
    return {next_obs_.data() + static_cast<std::size_t>(i) * obs_dim_,
            static_cast<std::size_t>(obs_dim_)};
  }

 private:
  int capacity_, obs_dim_, act_dim_;
  int head_ = 0, size_ = 0;
  std::vector<double> obs_, act_, rew_, next_obs_;
};

void soft_update(nn::MlpParams& target, const nn::MlpParams& src, double tau) {
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    for (std::size_t i = 0; i < target.weights[l].size(); ++i) {
      target.weights[l][i] = (1.0 - tau) * target.weights[l][i] + tau * src.weights[l][i];
    }
    for (std::size_t i = 0; i < target.biases[l].size(); ++i) {
      target.biases[l][i] = (1.0 - tau) * target.biases[l][i] + tau * src.biases[l][i];
    }
  }
}

void accumulate(nn::Gradients& acc, const nn::Gradients& g, double scale) {
  for (std::size_t l = 0; l < acc.weights.size(); ++l) {
    for (std::size_t i = 0; i < acc.weights[l].size(); ++i) {
      acc.weights[l][i] += g.weights[l][i] * scale;
    }
    for (std::size_t i = 0; i < acc.biases[l].size(); ++i) {
      acc.biases[l][i] += g.biases[l][i] * scale;
    }
  }
}

AgentPair train_loop(AgentPair agent, const SchedulerConfig& env_cfg,
                     const DrlConfig& drl, std::uint64_t seed, TrainingLog* log) {
  SchedulerEnv env(env_cfg, RngStream(seed).child(kTagEnv).seed());
  const int obs_dim = env.obs_dim();
  const int act_dim = env.action_dim();

  nn::MlpParams actor_target = agent.actor;
  nn::MlpParams critic_target = agent.critic;
  nn::SgdMomentum actor_opt(agent.actor, drl.actor_lr, drl.actor_momentum);
  nn::SgdMomentum critic_opt(agent.critic, drl.critic_lr, drl.critic_momentum);
  const nn::FreezeMask actor_mask = nn::FreezeMask::all_trainable(agent.actor.num_weight_layers());
  const nn::FreezeMask critic_mask = nn::FreezeMask::all_trainable(agent.critic.num_weight_layers());

  Replay replay(drl.replay_capacity, obs_dim, act_dim);
  RngStream warmup_rng = RngStream(seed).child(kTagWarmup);
  RngStream noise_rng = RngStream(seed).child(kTagNoise);
  RngStream replay_rng = RngStream(seed).child(kTagReplay);

  std::vector<double> obs = env.observe();
  std::int64_t slot_counter = 0;
  std::int64_t prev_terminal = 0;
  std::int64_t prev_lost = 0;
  std::vector<int> hold_slots(static_cast<std::size_t>(act_dim), 0);

  for (int episode = 0; episode < drl.episodes; ++episode) {
    double reward_sum = 0.0;
    double critic_loss_sum = 0.0;
    int updates = 0;

    for (int t = 0; t < drl.slots_per_episode; ++t, ++slot_counter) {
      std::vector<double> action;
      if (slot_counter < drl.warmup_slots) {
        // Uniform exploration before any gradients: independent shares that
        // get squashed onto the simplex.
        action.resize(static_cast<std::size_t>(act_dim));
        for (double& a : action) a = warmup_rng.uniform01();
        squash_to_simplex(action);
      } else {
        action = actor_act(agent.actor, obs, drl.noise_std, drl.noise_clip, &noise_rng);
      }
      if (drl.explore_dither_prob > 0.0) {
        bool dithered = false;
        for (double& a : action) {
          if (noise_rng.uniform01() < drl.explore_dither_prob) {
            a = noise_rng.uniform01() < 0.5 ? 0.0 : noise_rng.uniform(0.2, 1.0);
            dithered = true;
          }
        }
        if (dithered) squash_to_simplex(action);
      }
      if (drl.hold_explore_start_prob > 0.0) {
        for (int u = 0; u < act_dim; ++u) {
          auto& hold = hold_slots[static_cast<std::size_t>(u)];
          if (hold == 0 && noise_rng.uniform01() < drl.hold_explore_start_prob) {
            hold = drl.hold_explore_min_slots +
                   static_cast<int>(noise_rng.uniform01() *
                                    (drl.hold_explore_max_slots -
                                     drl.hold_explore_min_slots + 1));
          }
          if (hold > 0) {
            action[static_cast<std::size_t>(u)] = 0.0;
            --hold;
          }
        }
      }

      const SchedulerEnv::StepResult res = env.step(action);
      reward_sum += res.reward;
      std::vector<double> next_obs = env.observe();
      replay.push(obs, action, res.reward, next_obs);
      obs = std::move(next_obs);

      if (slot_counter >= drl.warmup_slots && replay.size() >= drl.batch_size &&
          slot_counter % drl.update_every == 0) {
        const int batch = drl.batch_size;
        const std::int64_t past_delay =
            slot_counter - drl.warmup_slots - drl.actor_update_delay_slots;
        bool update_actor = past_delay >= 0;
        if (update_actor && drl.actor_alternate_block_slots > 0) {
          update_actor = (past_delay / drl.actor_alternate_block_slots) % 2 == 1;
        }
        nn::Gradients critic_grads = nn::zero_gradients(agent.critic);
        nn::Gradients actor_grads = nn::zero_gradients(agent.actor);
        double batch_loss = 0.0;

        for (int b = 0; b < batch; ++b) {
          const int idx = static_cast<int>(replay_rng.uniform01() *
                                           static_cast<double>(replay.size()));
          const auto s = replay.obs(idx);
          const auto a = replay.act(idx);
          const auto s2 = replay.next_obs(idx);
          const double r = replay.reward(idx);

          // TD target through the target pair.
          std::vector<double> a2 = simplex_map(nn::forward(actor_target, s2));
          std::vector<double> critic_in2(s2.begin(), s2.end());
          critic_in2.insert(critic_in2.end(), a2.begin(), a2.end());
          const double q_next = nn::forward(critic_target, critic_in2)[0];
          const double target = r + drl.discount * q_next;

          std::vector<double> critic_in(s.begin(), s.end());
          critic_in.insert(critic_in.end(), a.begin(), a.end());
          const double q = nn::forward(agent.critic, critic_in)[0];
          const double err = q - target;
          batch_loss += err * err;
          const double out_grad[1] = {2.0 * err / static_cast<double>(batch)};
          const nn::BackwardResult cb = nn::backward(agent.critic, critic_in, out_grad);
          accumulate(critic_grads, cb.grads, 1.0);

          if (!update_actor) continue;

          // Deterministic policy gradient: ascend Q(s, map(actor(s))).
          std::vector<double> raw = nn::forward(agent.actor, s);
          std::vector<double> policy_action = simplex_map(raw);
          std::vector<double> critic_in_pi(s.begin(), s.end());
          critic_in_pi.insert(critic_in_pi.end(), policy_action.begin(), policy_action.end());
          const double one[1] = {1.0};
          const nn::BackwardResult qb = nn::backward(agent.critic, critic_in_pi, one);
          std::vector<double> dq_da(qb.input_grad.begin() + obs_dim, qb.input_grad.end());
          const std::vector<double> dq_draw = simplex_map_backward(policy_action, dq_da);
          std::vector<double> actor_out_grad(dq_draw.size());
          for (std::size_t i = 0; i < dq_draw.size(); ++i) {
            actor_out_grad[i] = -dq_draw[i] / static_cast<double>(batch);
          }
          const nn::BackwardResult ab = nn::backward(agent.actor, s, actor_out_grad);
          accumulate(actor_grads, ab.grads, 1.0);
        }

        batch_loss /= static_cast<double>(batch);
        critic_loss_sum += batch_loss;
        ++updates;
        if (batch_loss > drl.critic_loss_abort) {
          throw NumericalError("DRL diverged: critic loss " + std::to_string(batch_loss) +
                               " at slot " + std::to_string(slot_counter));
        }
        critic_opt.step(agent.critic, critic_grads, critic_mask);
        soft_update(critic_target, agent.critic, drl.tau);
        if (update_actor) {
          actor_opt.step(agent.actor, actor_grads, actor_mask);
          soft_update(actor_target, agent.actor, drl.tau);
        }
      }
    }

    if (log) {
      EpisodeStats st;
      st.mean_reward = reward_sum / static_cast<double>(drl.slots_per_episode);
      st.mean_critic_loss = updates > 0 ? critic_loss_sum / updates : 0.0;
      const std::int64_t terminal = env.terminal_packets();
      const std::int64_t lost = env.delay_violations() + env.decode_failures();
      st.terminal_packets = terminal - prev_terminal;
      st.packets_lost = lost - prev_lost;
      prev_terminal = terminal;
      prev_lost = lost;
      log->episodes.push_back(st);
    }
  }
  return agent;
}

}  // namespace

AgentPair pretrain(const SchedulerConfig& env_cfg, const DrlConfig& drl_cfg,
                   std::uint64_t seed, TrainingLog* log) {
  const int obs_dim = 3 * env_cfg.num_users;
  std::vector<int> actor_sizes{obs_dim};
  for (int h : drl_cfg.actor_hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(env_cfg.num_users);
  std::vector<int> critic_sizes{obs_dim + env_cfg.num_users};
  for (int h : drl_cfg.critic_hidden) critic_sizes.push_back(h);
  critic_sizes.push_back(1);

  AgentPair agent;
  // Identity logits; actor_act maps them onto the simplex.
  agent.actor = nn::mlp_init(actor_sizes, nn::Activation::kTanh, nn::Activation::kIdentity,
                             RngStream(seed).child(kTagInitActor).seed());
  agent.critic = nn::mlp_init(critic_sizes, nn::Activation::kTanh, nn::Activation::kIdentity,
                              RngStream(seed).child(kTagInitCritic).seed());
  return train_loop(std::move(agent), env_cfg, drl_cfg, seed, log);
}

AgentPair fine_tune(const AgentPair& agent, const SchedulerConfig& env_cfg,
                    const DrlConfig& drl_cfg, std::uint64_t seed, TrainingLog* log) {
  if (drl_cfg.episodes == 0) return agent;
  return train_loop(agent, env_cfg, drl_cfg, seed, log);
}

queue_sim::LossBreakdown evaluate(const nn::MlpParams& actor,
                                  const SchedulerConfig& env_cfg,
                                  std::int64_t min_packets, std::uint64_t seed,
                                  int jobs) {
  if (min_packets < 1) throw ConfigError("evaluate: min_packets >= 1");
  const double packets_per_slot = static_cast<double>(env_cfg.num_users) *
                                  env_cfg.arrival_rate_pps * env_cfg.slot_ms / 1000.0;
  // 10% headroom over the expectation; the terminal count is checked below.
  const auto total_slots = static_cast<std::int64_t>(
      std::ceil(1.1 * static_cast<double>(min_packets) / packets_per_slot));
  jobs = std::max(1, jobs);
  const std::int64_t shard_slots = (total_slots + jobs - 1) / jobs;

  std::vector<std::int64_t> delivered(static_cast<std::size_t>(jobs), 0);
  std::vector<std::int64_t> violations(static_cast<std::size_t>(jobs), 0);
  std::vector<std::int64_t> failures(static_cast<std::size_t>(jobs), 0);

  auto run_shard = [&](int shard) {
    SchedulerEnv env(env_cfg,
                     RngStream(seed).child(kTagEnv + 7 + static_cast<std::uint64_t>(shard)).seed());
    for (std::int64_t t = 0; t < shard_slots; ++t) {
      const std::vector<double> obs = env.observe();
      const std::vector<double> action = actor_act(actor, obs, 0.0);
      env.step(action);
    }
    delivered[static_cast<std::size_t>(shard)] = env.delivered();
    violations[static_cast<std::size_t>(shard)] = env.delay_violations();
    failures[static_cast<std::size_t>(shard)] = env.decode_failures();
  };

  if (jobs == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(run_shard, j);
    for (auto& th : pool) th.join();
  }

  std::int64_t d = 0, v = 0, f = 0;
  for (int j = 0; j < jobs; ++j) {
    d += delivered[static_cast<std::size_t>(j)];
    v += violations[static_cast<std::size_t>(j)];
    f += failures[static_cast<std::size_t>(j)];
  }
  if (d + v + f < min_packets) {
    throw InsufficientDataError("evaluate: only " + std::to_string(d + v + f) +
                                " terminal packets, need " + std::to_string(min_packets));
  }
  return queue_sim::loss_breakdown_from_counts(d, v, f);
}

}  // namespace urllc::scheduler
