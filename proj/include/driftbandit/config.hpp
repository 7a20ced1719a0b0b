#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "driftbandit/incentive.hpp"
#include "driftbandit/policy.hpp"

namespace driftbandit {

/// Validation failure; the message starts with the dotted key path at fault.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class EnvKind { Flip, Sinusoidal };

struct EnvSpec {
  EnvKind kind = EnvKind::Flip;
  // flip
  std::size_t segments = 2;  // p; breakpoints = p - 1
  double hi = 0.99;
  double lo = 0.01;
  // sinusoidal
  double budget = 3.0;  // V_T
  double amplitude = 0.3;
  double active_fraction = 1.0;

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

struct PolicySpec {
  PolicyParams params;
  /// When set, gamma (resp. tau) is derived from the breakpoint count.
  std::optional<double> gamma_c;
  std::optional<double> tau_c;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct RestartSpec {
  std::optional<std::size_t> sigma;  // unset: sized from V_T via lambda
  double lambda = 1.0;

  friend bool operator==(const RestartSpec&, const RestartSpec&) = default;
};

struct OutputSpec {
  bool trace = false;           // write trace.csv
  std::size_t trace_reps = 1;   // replications included in the trace
  bool curves = false;          // write per-step mean curves
  std::string summary = "summary.json";

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  std::size_t T = 5000;
  std::size_t K = 2;
  std::size_t reps = 100;
  std::uint64_t base_seed = 1;
  EnvSpec env;
  PolicySpec policy;
  DriftModel incentive;
  std::optional<RestartSpec> restart;
  OutputSpec outputs;

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict parse: unknown keys and mistyped values throw ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
/// Parse then apply `key=value` overrides (dotted paths, JSON-typed values;
/// a value that is not valid JSON is taken as a string).
ExperimentConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides);
std::string serialize_config(const ExperimentConfig& config);

}  // namespace driftbandit
