#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "berglab/domain.hpp"
#include "berglab/kernels.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/weights.hpp"

namespace berglab::harness {

/// Malformed or unreadable configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightConfig {
  /// "constant", "power" or "table".
  std::string kind = "constant";
  double value = 1.0;
  double t = 0.0;
  std::string path;
};

struct KernelConfig {
  KernelMode mode = KernelMode::ClosedForm;
  int max_degree = 60;
};

struct ExperimentConfig {
  std::string domain = "disk";
  WeightConfig weight;
  double p = 2.0;
  KernelConfig kernel;
  QuadratureSpec quadrature = QuadratureSpec::uniform(20000, 1);
  std::uint64_t seed = 1;
  /// Experiment-specific settings; every probe supplies its own defaults.
  nlohmann::json knobs = nlohmann::json::object();
  std::string output_dir;
  /// Parsed document, echoed into the report.
  nlohmann::json source = nlohmann::json::object();

  Domain make_domain() const;
  Weight make_weight(const Domain& domain) const;
  KernelEvaluator make_kernel(const Domain& domain) const;

  template <class T>
  T knob(const std::string& key, const T& fallback) const {
    if (!knobs.contains(key)) return fallback;
    try {
      return knobs.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("knob '" + key + "': " + e.what());
    }
  }
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

}  // namespace berglab::harness
