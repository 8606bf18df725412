#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "urllc/errors.hpp"
#include "urllc/scheduler.hpp"

using namespace urllc;
using scheduler::DrlConfig;
using scheduler::SchedulerConfig;
using scheduler::SchedulerEnv;

namespace {

SchedulerConfig near_field_cfg() {
  SchedulerConfig cfg;
  cfg.distances_m = {2.0, 3.0};  // enormous snr: decoding never fails
  return cfg;
}

nn::MlpParams constant_actor(int obs_dim, int users, double logit) {
  // Zero weights, constant logit per user; shares come out as
  // exp(logit) / (1 + users * exp(logit)).
  auto p = nn::mlp_init({obs_dim, 8, users}, nn::Activation::kTanh,
                        nn::Activation::kIdentity, 1);
  for (auto& layer : p.weights) std::fill(layer.begin(), layer.end(), 0.0);
  for (auto& layer : p.biases) std::fill(layer.begin(), layer.end(), 0.0);
  std::fill(p.biases.back().begin(), p.biases.back().end(), logit);
  return p;
}

}  // namespace

TEST_CASE("env: empty queues give zero reward and the state advances") {
  SchedulerConfig cfg = near_field_cfg();
  cfg.arrival_rate_pps = 1e-9;  // arrivals essentially never
  SchedulerEnv env(cfg, 5);
  const std::vector<double> idle{0.0, 0.0};
  for (int t = 0; t < 50; ++t) {
    const auto res = env.step(idle);
    CHECK(res.reward == 0.0);
    CHECK(res.packets_lost == 0);
  }
  CHECK(env.terminal_packets() == 0);
  CHECK(env.observe().size() == 6);
}

TEST_CASE("env: fixed seed and action sequence replay bit-identically") {
  const SchedulerConfig cfg;  // default 40/60 m
  SchedulerEnv a(cfg, 42), b(cfg, 42);
  RngStream action_rng(7);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> act{action_rng.uniform01() * 0.6, action_rng.uniform01() * 0.4};
    const auto ra = a.step(act);
    const auto rb = b.step(act);
    CHECK(ra.reward == rb.reward);
    CHECK(a.observe() == b.observe());
  }
  CHECK(a.delivered() == b.delivered());
  CHECK(a.decode_failures() == b.decode_failures());
}

TEST_CASE("env: full service at huge snr delivers everything") {
  SchedulerConfig cfg = near_field_cfg();
  SchedulerEnv env(cfg, 11);
  const std::vector<double> half{0.5, 0.5};
  for (int t = 0; t < 30000; ++t) env.step(half);
  CHECK(env.delivered() > 5000);
  CHECK(env.decode_failures() == 0);
  CHECK(env.delay_violations() == 0);
}

TEST_CASE("env: invalid actions are clamped, not fatal") {
  SchedulerConfig cfg = near_field_cfg();
  SchedulerEnv env(cfg, 3);
  const std::vector<double> bad{1.4, 0.9};
  const std::vector<double> worse{-0.5, 2.0};
  CHECK_NOTHROW(env.step(bad));
  CHECK_NOTHROW(env.step(worse));
  CHECK(env.clamped_actions() == 2);
  const std::vector<double> wrong_size{0.5};
  CHECK_THROWS_AS(env.step(wrong_size), ShapeError);
}

TEST_CASE("actor_act: zero noise is the pure mapped policy") {
  const auto actor = constant_actor(6, 2, 0.0);  // logits (0, 0) -> thirds
  const std::vector<double> obs(6, 0.3);
  const auto act = scheduler::actor_act(actor, obs, 0.0);
  REQUIRE(act.size() == 2);
  CHECK(act[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(act[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Strong logit asymmetry concentrates the band on one user.
  auto single = constant_actor(6, 2, 0.0);
  single.biases.back() = {8.0, -8.0};
  const auto act2 = scheduler::actor_act(single, obs, 0.0);
  CHECK(act2[0] > 0.99);
  CHECK(act2[1] < 1e-3);
}

TEST_CASE("actor_act: outputs satisfy the simplex constraint under noise") {
  const auto actor =
      nn::mlp_init({6, 40, 40, 2}, nn::Activation::kTanh, nn::Activation::kIdentity, 3);
  RngStream obs_rng(1), noise_rng(2);
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<double> obs(6);
    for (double& v : obs) v = obs_rng.uniform(-1.0, 2.0);
    const auto act = scheduler::actor_act(actor, obs, 0.1, 0.2, &noise_rng);
    double sum = 0.0;
    for (double a : act) {
      CHECK(a >= 0.0);
      sum += a;
    }
    CHECK(sum <= 1.0 + 1e-12);
  }
}

TEST_CASE("actor_act: noise std lands in the expected band at interior points") {
  // logit ln(1/2): shares e^u/(1+2e^u) = 0.25 each, interior point.
  const auto actor = constant_actor(6, 2, std::log(0.5));
  const std::vector<double> obs(6, 0.0);
  RngStream noise_rng(9);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto act = scheduler::actor_act(actor, obs, 0.1, 0.2, &noise_rng);
    sum += act[0];
    sq += act[0] * act[0];
  }
  const double mean = sum / n;
  const double std = std::sqrt(sq / n - mean * mean);
  CHECK(std > 0.05);
  CHECK(std < 0.15);
}

TEST_CASE("evaluate: an idle actor loses every packet to the delay bound") {
  SchedulerConfig cfg = near_field_cfg();
  const auto idle = constant_actor(6, 2, -40.0);  // sigmoid ~ 0: never transmit
  const auto b = scheduler::evaluate(idle, cfg, 2000, 77);
  CHECK(b.overall == doctest::Approx(1.0));
  CHECK(b.delay_violation_prob == doctest::Approx(1.0));
  CHECK(b.decode_error_prob == 0.0);
  CHECK(b.overall ==
        doctest::Approx(b.delay_violation_prob + b.decode_error_prob).epsilon(1e-15));
}

TEST_CASE("evaluate: sharded run reduces to the same totals deterministically") {
  SchedulerConfig cfg = near_field_cfg();
  const auto actor = constant_actor(6, 2, 0.0);
  const auto once = scheduler::evaluate(actor, cfg, 3000, 123, 2);
  const auto twice = scheduler::evaluate(actor, cfg, 3000, 123, 2);
  CHECK(once.total_packets == twice.total_packets);
  CHECK(once.overall == twice.overall);
}

TEST_CASE("pretrain: degenerate single-user env reaches near-zero loss") {
  SchedulerConfig cfg;
  cfg.num_users = 1;
  cfg.distances_m = {1.5};
  DrlConfig drl;
  drl.episodes = 8;
  drl.slots_per_episode = 400;
  drl.warmup_slots = 300;
  drl.update_every = 4;
  scheduler::TrainingLog log;
  const auto agent = scheduler::pretrain(cfg, drl, 2024, &log);
  CHECK(log.episodes.size() == 8);
  const auto b = scheduler::evaluate(agent.actor, cfg, 20000, 5);
  CHECK(b.overall < 1e-4);
}

TEST_CASE("pretrain is deterministic per seed") {
  SchedulerConfig cfg = near_field_cfg();
  DrlConfig drl;
  drl.episodes = 3;
  drl.slots_per_episode = 300;
  drl.warmup_slots = 200;
  drl.update_every = 4;
  const auto a = scheduler::pretrain(cfg, drl, 99);
  const auto b = scheduler::pretrain(cfg, drl, 99);
  for (std::size_t l = 0; l < a.actor.weights.size(); ++l) {
    CHECK(a.actor.weights[l] == b.actor.weights[l]);  // bitwise
  }
  for (std::size_t l = 0; l < a.critic.weights.size(); ++l) {
    CHECK(a.critic.weights[l] == b.critic.weights[l]);
  }
}

TEST_CASE("fine_tune with zero budget returns the agent unchanged") {
  SchedulerConfig cfg = near_field_cfg();
  DrlConfig drl;
  drl.episodes = 2;
  drl.slots_per_episode = 200;
  drl.warmup_slots = 150;
  const auto agent = scheduler::pretrain(cfg, drl, 8);
  DrlConfig ft = drl;
  ft.episodes = 0;
  const auto same = scheduler::fine_tune(agent, cfg, ft, 9);
  for (std::size_t l = 0; l < agent.actor.weights.size(); ++l) {
    CHECK(same.actor.weights[l] == agent.actor.weights[l]);
  }
}

TEST_CASE("mismatch env is strictly harsher for a fixed policy") {
  SchedulerConfig ideal;  // default distances
  SchedulerConfig mm = ideal;
  mm.mismatch.enabled = true;
  const auto actor = constant_actor(6, 2, 0.0);
  const auto ideal_b = scheduler::evaluate(actor, ideal, 100000, 31);
  const auto mm_b = scheduler::evaluate(actor, mm, 100000, 31);
  CHECK(mm_b.overall > ideal_b.overall);
}
