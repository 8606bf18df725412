#pragma once

#include <string>

#include <json.hpp>

#include "urllc/config.hpp"

namespace urllc::experiments {

// End-to-end seeded pipelines. Each writes its artifact files under
// cfg.out_dir and returns the metrics document it also stored as
// <name>_metrics.json. Metric files carry no timestamps, so identical
// (config, seed) runs are byte-identical; wall-clock goes to
// run_report.json only.

nlohmann::ordered_json run_mobility(const config::ExperimentConfig& cfg);
nlohmann::ordered_json run_scheduler(const config::ExperimentConfig& cfg);
nlohmann::ordered_json run_assoc(const config::ExperimentConfig& cfg);
nlohmann::ordered_json run_fed(const config::ExperimentConfig& cfg);

// mobility + scheduler + assoc + fed, plus summary.txt and run_report.json.
nlohmann::ordered_json run_all(const config::ExperimentConfig& cfg);

}  // namespace urllc::experiments
