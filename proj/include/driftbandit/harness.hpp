#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftbandit/config.hpp"
#include "driftbandit/env.hpp"
#include "driftbandit/incentive.hpp"
#include "driftbandit/policy.hpp"

namespace driftbandit {

/// gamma = 1 - (1/gamma_c) sqrt(beta_T / T), clamped into (0, 1).
/// beta_T = 0 is treated as 1.
double tuned_gamma(std::size_t beta_T, std::size_t horizon, double gamma_c);
/// tau = floor(tau_c sqrt(T ln T / beta_T)), clamped into [1, T].
std::size_t tuned_tau(std::size_t beta_T, std::size_t horizon, double tau_c);

/// Environment and parameters resolved from a config; immutable and shared
/// by every replication.
struct Scenario {
  MeanSchedule schedule;
  std::vector<std::size_t> breakpoints;  // flip only
  double budget = 0.0;                   // V_T (sinusoidal) or measured variation (flip)
  PolicyParams policy;                   // gamma/tau after tuning
  std::size_t sigma = 0;                 // batch size; T without restarts
};

Scenario build_scenario(const ExperimentConfig& config);

struct Metric {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean

  friend bool operator==(const Metric&, const Metric&) = default;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  double pseudo_regret = 0.0;    // sum mu*_t - mu_t(a_t)
  double realized_regret = 0.0;  // sum mu*_t - X_t(a_t)
  double compensation = 0.0;     // sum chi_t
  double total_reward = 0.0;     // sum X_t(a_t)
};

/// Per-step mean (and standard error) of cumulative metrics across reps.
struct MeanCurves {
  std::vector<double> pseudo_regret, pseudo_regret_se;
  std::vector<double> realized_regret, realized_regret_se;
  std::vector<double> compensation, compensation_se;
  std::vector<double> reward, reward_se;
};

struct AggregateSummary {
  ExperimentConfig config;
  Scenario scenario;
  std::size_t reps = 0;
  Metric pseudo_regret;
  Metric realized_regret;
  Metric compensation;
  Metric total_reward;
  std::vector<std::uint64_t> seeds;
  std::optional<MeanCurves> curves;
};

/// Row of the trace CSV.
struct TraceRow {
  std::size_t rep = 0;
  StepOutcome step;
  double cum_pseudo_regret = 0.0;
  double cum_realized_regret = 0.0;
  double cum_comp = 0.0;
};

/// Order-independent sum used for every cross-replication reduction.
double pairwise_sum(std::span<const double> values);
/// Mean and standard error (sample sd / sqrt(n); 0 for n = 1).
Metric summarize(std::span<const double> values);

/// One replication; seed = replication_seed(base_seed, rep).
ReplicationResult run_replication(const ExperimentConfig& config, std::size_t rep);
ReplicationResult run_replication(const ExperimentConfig& config, const Scenario& scenario,
                                  std::size_t rep);
std::vector<TraceRow> trace_replication(const ExperimentConfig& config, const Scenario& scenario,
                                        std::size_t rep);

struct RunOptions {
  std::size_t workers = 1;
  bool curves = false;
};

/// All replications, fanned out over `workers` threads. The result does not
/// depend on the worker count.
AggregateSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepGrid {
  std::vector<double> gamma_c;  // swept when the policy is DUCB
  std::vector<double> tau_c;    // swept when the policy is SWUCB
};

struct SweepRow {
  std::optional<double> gamma_c;
  std::optional<double> tau_c;
  double gamma = 1.0;
  std::size_t tau = 1;
  Metric pseudo_regret;
  Metric compensation;
};

struct SweepResult {
  std::vector<SweepRow> table;
  std::size_t best = 0;  // first row with the strictly lowest mean regret
};

/// DUCB sweeps gamma_c, SWUCB sweeps tau_c, other policies run once.
SweepResult sweep(const ExperimentConfig& config, const SweepGrid& grid, std::size_t workers = 1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;
  std::string reason;
};

/// Least squares of ln y on ln x. Degenerate with < 3 points, nonpositive
/// values or constant x.
SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct ScalingReport {
  std::vector<std::size_t> horizons;
  std::vector<double> mean_regret;
  std::vector<double> mean_compensation;
  SlopeFit regret_fit;
  SlopeFit compensation_fit;
};

/// Reruns `base` at every horizon (tuned gamma/tau and sigma re-derived per
/// T) and fits log-log slopes of mean pseudo-regret and compensation.
ScalingReport scaling_probe(const ExperimentConfig& base, std::span<const std::size_t> horizons,
                            std::size_t workers = 1);

struct GapDiagnostic {
  std::size_t sigma = 1;
  double epsilon = 0.0;
  /// gaps[j][a] = (1/sigma) sum_{t in batch j} (mu*_t - mu_t(a)).
  std::vector<std::vector<double>> gaps;
  /// min over batches of the gaps of every arm except the batch's best one.
  double min_gap = 0.0;
  /// sum_t sum_a sum_{b != a} 1(mu_t(a) - mu_t(b) <= epsilon).
  std::uint64_t near_tie_count = 0;
  /// Least alpha with near_tie_count <= T^alpha (0 when the count is <= 1).
  double alpha = 0.0;
};

GapDiagnostic gap_diagnostic(const MeanSchedule& schedule, std::size_t sigma, double epsilon);

}  // namespace driftbandit
