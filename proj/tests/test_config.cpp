#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "urllc/config.hpp"
#include "urllc/errors.hpp"

using namespace urllc;
using config::parse_config_text;

TEST_CASE("empty config resolves to the full defaults") {
  const auto cfg = parse_config_text("");
  CHECK(cfg.seed == 7);
  CHECK(cfg.scheduler.env.qos.d_min_ms == 9);
  CHECK(cfg.scheduler.env.qos.d_max_ms == 11);
  CHECK(cfg.scheduler.env.total_bandwidth_hz == 5e6);
  CHECK(cfg.scheduler.env.arrival_rate_pps == 100.0);
  CHECK(cfg.scheduler.env.packet_bits == 1600);
  CHECK(cfg.mobility.trajectory.duration_ms == 2000000);
  CHECK(cfg.assoc.train_samples == 8000);
  CHECK(cfg.assoc.finetune_samples == 500);
}

TEST_CASE("values parse with sections and comments") {
  const std::string text = R"(
# comment
[run]
seed = 123
jobs = 2

[scheduler]
d_min_ms = 4
d_max_ms = 6
distances_m = 10, 20
arrival_rate_pps = 50.5
)";
  const auto cfg = parse_config_text(text);
  CHECK(cfg.seed == 123);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.scheduler.env.qos.d_min_ms == 4);
  CHECK(cfg.scheduler.env.qos.d_max_ms == 6);
  CHECK(cfg.scheduler.env.distances_m == std::vector<double>{10.0, 20.0});
  CHECK(cfg.scheduler.env.arrival_rate_pps == 50.5);
}

TEST_CASE("contradictory delay bounds are rejected") {
  const std::string text = "[scheduler]\nd_min_ms = 12\nd_max_ms = 11\n";
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("d_min") != std::string::npos);
  }
}

TEST_CASE("unknown keys and sections are named in the diagnostic") {
  try {
    parse_config_text("[scheduler]\nfoo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("foo") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[nope]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("key_without_section = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[run]\nseed 12\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[run]\nseed = notanumber\n"), ConfigError);
}

TEST_CASE("type errors carry the line number") {
  try {
    parse_config_text("[mobility]\n\nnoise_std_m = squishy\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("config echo reparses to the same configuration") {
  auto cfg = config::default_config();
  cfg.seed = 99;
  cfg.scheduler.env.mismatch.decode_penalty = 12.5;
  cfg.mobility.horizons_ms = {5, 10};
  const auto back = parse_config_text(config::config_echo(cfg));
  CHECK(back.seed == 99);
  CHECK(back.scheduler.env.mismatch.decode_penalty == 12.5);
  CHECK(back.mobility.horizons_ms == std::vector<int>{5, 10});
  CHECK(back.assoc.train.epochs == cfg.assoc.train.epochs);
  CHECK(back.scheduler.pretrain.episodes == cfg.scheduler.pretrain.episodes);
  CHECK(back.fed.cells == cfg.fed.cells);
}

TEST_CASE("missing config file is a config error") {
  CHECK_THROWS_AS(config::validate_config("/nonexistent/path.cfg"), ConfigError);
}
