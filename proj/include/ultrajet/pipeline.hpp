#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ultrajet/config.hpp"

namespace ultrajet {

/// seq, fn, matrix, check, cubes, pou, extend, verify, all
const std::vector<std::string>& commands();

struct RunOutcome {
  nlohmann::json report;
  int exit_code = 0;  ///< 0 all checks pass, 1 a verdict or invariant failed
  std::vector<std::string> artifacts;  ///< file names inside the output directory
};

/// Runs one command and writes the report and CSV files into `out_dir` (created if needed).
/// Config errors are thrown as Error(ConfigError); every other failure lands in the report.
RunOutcome run(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir);

/// Report for a config that could not be loaded.
nlohmann::json config_error_report(const std::string& command, const std::string& message);

}  // namespace ultrajet
