#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultrajet/conditions.hpp"
#include "ultrajet/extend.hpp"
#include "ultrajet/fncore.hpp"
#include "ultrajet/jets.hpp"
#include "ultrajet/seqcore.hpp"

namespace ultrajet {

inline constexpr int kSchemaVersion = 1;

/// Experiment description. Every field has a default; `to_json` writes all of
/// them so a report's echo reruns the same experiment.
struct ExperimentConfig {
  std::size_t k_max = kDefaultKMax;
  std::uint64_t seed = 1;
  unsigned workers = 1;  ///< command line only; never echoed since results do not depend on it
  bool strict = false;

  nlohmann::json sequence;  ///< {"kind": "gevrey" | "mu" | "log_M" | "power_mu", ...}
  nlohmann::json function;  ///< {"kind": "power" | "log_power" | "gevrey_dual" | "of_sequence" | "tabulated", ...}
  nlohmann::json heir;      ///< same shape; null means the function itself
  std::vector<double> x_grid;

  ConditionOptions conditions;
  double chain_x = 1.0;

  nlohmann::json set;  ///< {"dim", "points", "sampled", "box"}
  nlohmann::json jet;  ///< preset tree
  unsigned jet_order = 12;

  unsigned depth_cap = 14;
  double max_collar = 0.0;  ///< 0: unlimited
  std::size_t diagnostic_samples = 100;

  BumpOptions pou;
  std::size_t sum_check_points = 100001;  ///< per axis in 1D, square-rooted in 2D

  std::string mode = "single";  ///< or "matrix"
  double rho = 1.0 / 64;
  double guard = 64.0;
  unsigned degree_cap = 0;  ///< 0: the jet order
  VerifyOptions verify;

  std::string report_name = "report.json";
};

/// Throws Error(ConfigError) naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

WeightSequence make_sequence(const nlohmann::json& desc, std::size_t k_max);
WeightFunction make_function(const nlohmann::json& desc, std::size_t k_max);
JetPreset make_preset(const nlohmann::json& desc);
CompactSet make_set(const nlohmann::json& desc);

}  // namespace ultrajet
