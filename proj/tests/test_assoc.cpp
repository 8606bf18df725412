#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "urllc/assoc.hpp"
#include "urllc/errors.hpp"
#include "urllc/radio.hpp"
#include "urllc/rng.hpp"

using namespace urllc;
using assoc::AssocInstance;
using assoc::AssocParams;
using assoc::Assignment;
using assoc::Decision;
using assoc::RegionRatio;
using assoc::ServiceClass;

namespace {

int region_count(const AssocInstance& inst, int region) {
  int n = 0;
  for (const auto& mu : inst.users) {
    if (mu.region == region) ++n;
  }
  return n;
}

AssocInstance single_user_instance(double gain, ServiceClass cls) {
  AssocInstance inst;
  assoc::MobileUser mu;
  mu.service = cls;
  mu.gain_ap1 = gain;
  mu.gain_ap2 = gain / 10.0;
  mu.arrival_rate_pps = 100.0;
  inst.users.push_back(mu);
  return inst;
}

Assignment all_of(std::size_t n, Decision d) {
  Assignment a;
  a.decisions.assign(n, d);
  return a;
}

}  // namespace

TEST_CASE("gen_instance honors the region ratio and seed") {
  const auto i55 = assoc::gen_instance(RegionRatio::k5to5, 1);
  CHECK(region_count(i55, 1) == 5);
  CHECK(region_count(i55, 2) == 5);
  const auto i91 = assoc::gen_instance(RegionRatio::k9to1, 1);
  CHECK(region_count(i91, 1) == 9);
  CHECK(region_count(i91, 2) == 1);

  const auto again = assoc::gen_instance(RegionRatio::k5to5, 1);
  for (std::size_t m = 0; m < i55.users.size(); ++m) {
    CHECK(again.users[m].gain_ap1 == i55.users[m].gain_ap1);
    CHECK(again.users[m].arrival_rate_pps == i55.users[m].arrival_rate_pps);
  }
  // Classes are fixed: first five URLLC, last five delay-tolerant.
  for (std::size_t m = 0; m < 5; ++m) CHECK(i55.users[m].service == ServiceClass::kUrllc);
  for (std::size_t m = 5; m < 10; ++m) {
    CHECK(i55.users[m].service == ServiceClass::kDelayTolerant);
  }
  for (const auto& mu : i55.users) {
    CHECK(mu.gain_ap1 > 0.0);
    CHECK(mu.gain_ap2 > 0.0);
    CHECK(mu.arrival_rate_pps >= i55.params.rate_min_pps);
    CHECK(mu.arrival_rate_pps <= i55.params.rate_max_pps);
  }
}

TEST_CASE("single-user energies match hand evaluation") {
  AssocInstance inst = single_user_instance(1e-10, ServiceClass::kDelayTolerant);
  const AssocParams& p = inst.params;

  const auto local = assoc::evaluate_assignment(inst, all_of(1, Decision::kLocal));
  const double want_local = 1e-27 * 1e9 * 1e9 * p.cycles_per_bit;
  CHECK(local.energy_per_bit[0] == doctest::Approx(want_local).epsilon(1e-12));
  CHECK(local.feasible);

  const auto off = assoc::evaluate_assignment(inst, all_of(1, Decision::kAp1));
  const double snr = 0.1 * 1e-10 / (p.noise_psd * p.ap_bandwidth_hz);
  const double rate = p.ap_bandwidth_hz * std::log2(1.0 + snr);
  CHECK(off.energy_per_bit[0] == doctest::Approx(0.1 / rate).epsilon(1e-12));
  CHECK(off.objective == doctest::Approx(0.1 / rate).epsilon(1e-12));
}

TEST_CASE("all-local objective ignores channel gains") {
  auto a = assoc::gen_instance(RegionRatio::k5to5, 3);
  auto b = a;
  for (auto& mu : b.users) {
    mu.gain_ap1 *= 17.0;
    mu.gain_ap2 *= 0.01;
  }
  const auto ra = assoc::evaluate_assignment(a, all_of(10, Decision::kLocal));
  const auto rb = assoc::evaluate_assignment(b, all_of(10, Decision::kLocal));
  CHECK(ra.objective == rb.objective);
}

TEST_CASE("equal split: one more offloader never cheapens the others") {
  RngStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = assoc::gen_instance(RegionRatio::k5to5, 100 + trial);
    Assignment base = all_of(10, Decision::kLocal);
    // Offload a random subset to AP1, then add one more.
    std::vector<int> offloaders;
    for (int m = 0; m < 10; ++m) {
      if (rng.uniform01() < 0.4) {
        base.decisions[static_cast<std::size_t>(m)] = Decision::kAp1;
        offloaders.push_back(m);
      }
    }
    int extra = -1;
    for (int m = 0; m < 10; ++m) {
      if (base.decisions[static_cast<std::size_t>(m)] == Decision::kLocal) {
        extra = m;
        break;
      }
    }
    if (extra < 0 || offloaders.empty()) continue;
    const auto before = assoc::evaluate_assignment(inst, base);
    Assignment more = base;
    more.decisions[static_cast<std::size_t>(extra)] = Decision::kAp1;
    const auto after = assoc::evaluate_assignment(inst, more);
    for (int m : offloaders) {
      CHECK(after.energy_per_bit[static_cast<std::size_t>(m)] >=
            before.energy_per_bit[static_cast<std::size_t>(m)] - 1e-18);
    }
  }
}

TEST_CASE("exhaustive search picks local when offloading is hopeless") {
  // Tiny gains: the uplink is both unreliable (URLLC) and energy-expensive.
  AssocInstance inst = single_user_instance(1e-15, ServiceClass::kUrllc);
  const auto res = assoc::exhaustive_optimal(inst);
  CHECK(res.report.feasible);
  CHECK(res.assignment.decisions[0] == Decision::kLocal);
}

TEST_CASE("oracle dominance against sampled feasible assignments") {
  RngStream rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const auto inst = assoc::gen_instance(RegionRatio::k5to5, 500 + trial);
    const auto opt = assoc::exhaustive_optimal(inst);
    REQUIRE(opt.report.feasible);
    int found = 0;
    int attempts = 0;
    while (found < 100 && attempts < 5000) {
      ++attempts;
      Assignment a;
      for (int m = 0; m < 10; ++m) {
        a.decisions.push_back(static_cast<Decision>(
            static_cast<int>(rng.uniform01() * 3.0)));
      }
      const auto rep = assoc::evaluate_assignment(inst, a);
      if (!rep.feasible) continue;
      ++found;
      CHECK(opt.report.objective <= rep.objective + 1e-18);
    }
    CHECK(found == 100);

    const auto snr_rep =
        assoc::evaluate_assignment(inst, assoc::highest_snr_baseline(inst));
    CHECK(opt.report.objective <= snr_rep.objective + 1e-18);
  }
}

TEST_CASE("highest-gain baseline never goes local, ties to AP1") {
  auto inst = assoc::gen_instance(RegionRatio::k5to5, 77);
  inst.users[0].gain_ap1 = 2e-9;
  inst.users[0].gain_ap2 = 1e-9;
  inst.users[1].gain_ap1 = 1e-9;
  inst.users[1].gain_ap2 = 1e-9;  // tie
  inst.users[2].gain_ap1 = 1e-10;
  inst.users[2].gain_ap2 = 3e-10;
  const auto a = assoc::highest_snr_baseline(inst);
  CHECK(a.decisions[0] == Decision::kAp1);
  CHECK(a.decisions[1] == Decision::kAp1);
  CHECK(a.decisions[2] == Decision::kAp2);
  for (const auto d : a.decisions) CHECK(d != Decision::kLocal);
}

TEST_CASE("dataset labels re-verify as optimal under fresh enumeration") {
  const auto ds = assoc::build_dataset(12, RegionRatio::k5to5, 31337);
  REQUIRE(ds.features.size() == 12);
  REQUIRE(ds.instance_seeds.size() == 12);
  for (std::size_t i = 0; i < ds.features.size(); ++i) {
    CHECK(ds.features[i].size() == 30);
    const auto inst = assoc::gen_instance(RegionRatio::k5to5, ds.instance_seeds[i]);
    const auto opt = assoc::exhaustive_optimal(inst);
    REQUIRE(opt.report.feasible);
    for (std::size_t m = 0; m < 10; ++m) {
      CHECK(static_cast<int>(opt.assignment.decisions[m]) == ds.labels[i][m]);
    }
    const auto feat = assoc::instance_features(inst);
    for (std::size_t f = 0; f < feat.size(); ++f) {
      CHECK(feat[f] == ds.features[i][f]);
    }
  }
  // Deterministic rebuild.
  const auto again = assoc::build_dataset(12, RegionRatio::k5to5, 31337);
  CHECK(again.labels == ds.labels);
}

TEST_CASE("scale covariance: scaling power and kappa scales every energy") {
  const auto inst = assoc::gen_instance(RegionRatio::k5to5, 404);
  auto scaled = inst;
  const double c = 3.0;
  for (auto& mu : scaled.users) {
    mu.tx_power_w *= c;
    mu.kappa *= c;
  }
  const auto base_opt = assoc::exhaustive_optimal(inst);
  const auto scaled_opt = assoc::exhaustive_optimal(scaled);
  // Note: scaling tx power also scales snr, which perturbs the Shannon rate,
  // so exact covariance holds for the local term and the argmin stays put
  // only when feasibility is unchanged; check the local energies exactly.
  const auto rep_a = assoc::evaluate_assignment(inst, all_of(10, Decision::kLocal));
  const auto rep_b = assoc::evaluate_assignment(scaled, all_of(10, Decision::kLocal));
  for (std::size_t m = 0; m < 10; ++m) {
    CHECK(rep_b.energy_per_bit[m] == doctest::Approx(c * rep_a.energy_per_bit[m]).epsilon(1e-12));
  }
  CHECK(base_opt.report.feasible);
  CHECK(scaled_opt.report.feasible);
}

TEST_CASE("dnn training memorizes a small dataset and infer stays valid") {
  const auto ds = assoc::build_dataset(10, RegionRatio::k5to5, 222);
  assoc::AssocTrainConfig cfg;
  cfg.hidden = {64, 64};
  cfg.epochs = 150;
  cfg.batch_size = 10;
  cfg.learning_rate = 0.08;
  cfg.seed = 5;
  assoc::AssocTrainLog log;
  const auto net = assoc::train_assoc_dnn(ds, cfg, &log);
  REQUIRE(log.epoch_accuracy.size() == 150);
  CHECK(assoc::decision_accuracy(net, ds) == doctest::Approx(1.0));

  // On a memorized sample the inferred assignment equals the oracle label.
  const auto inst = assoc::gen_instance(RegionRatio::k5to5, ds.instance_seeds[0]);
  const auto inferred = assoc::infer_assignment(net, inst);
  for (std::size_t m = 0; m < 10; ++m) {
    CHECK(static_cast<int>(inferred.decisions[m]) == ds.labels[0][m]);
  }

  // Any net output is a valid assignment (and repair keeps it evaluable).
  const auto random_net =
      nn::mlp_init({30, 16, 30}, nn::Activation::kRelu, nn::Activation::kSoftmax, 99, 3);
  const auto wild = assoc::infer_assignment(random_net, inst);
  CHECK(wild.decisions.size() == 10);
  const auto rep = assoc::evaluate_assignment(inst, wild);
  CHECK(rep.energy_per_bit.size() == 10);
}

TEST_CASE("fine-tune with no data returns the net unchanged") {
  const auto ds = assoc::build_dataset(4, RegionRatio::k5to5, 5150);
  assoc::AssocTrainConfig cfg;
  cfg.hidden = {16};
  cfg.epochs = 10;
  cfg.seed = 2;
  const auto net = assoc::train_assoc_dnn(ds, cfg);
  assoc::Dataset empty;
  const auto same = assoc::fine_tune_on_shift(net, empty, assoc::FineTuneMode::kAllLayers, cfg);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    CHECK(same.weights[l] == net.weights[l]);
  }
}
