#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftbandit/rng.hpp"

namespace driftbandit {

// Time steps are 1-indexed (t in [1, T]); arms are 0-indexed in the C++ API
// and written 1-indexed in every external file format.

/// Mean rewards mu_t(a) in [0, 1] for K arms over T steps.
class MeanSchedule {
 public:
  /// `means` is row-major by step: means[(t - 1) * arms + a].
  MeanSchedule(std::size_t arms, std::size_t horizon, std::vector<double> means);

  std::size_t arms() const noexcept { return arms_; }
  std::size_t horizon() const noexcept { return horizon_; }

  double mean(std::size_t t, std::size_t arm) const;
  std::span<const double> means_at(std::size_t t) const;

  /// argmax_a mu_t(a), lowest index on ties.
  std::size_t optimal_arm(std::size_t t) const;
  double optimal_mean(std::size_t t) const;

  /// Unchecked row access for hot loops; t must already be validated.
  const double* row(std::size_t t) const noexcept { return means_.data() + (t - 1) * arms_; }

  friend bool operator==(const MeanSchedule&, const MeanSchedule&) = default;

 private:
  void check_step(std::size_t t) const;

  std::size_t arms_;
  std::size_t horizon_;
  std::vector<double> means_;
};

/// Piecewise-constant schedule. Breakpoint b is the last step of its segment,
/// so means change between steps b and b + 1.
struct AbruptEnvironment {
  MeanSchedule schedule;
  std::vector<std::size_t> breakpoints;

  std::size_t beta_T() const noexcept { return breakpoints.size(); }
};

/// Schedule whose total variation is capped by `budget` (V_T).
struct DriftingEnvironment {
  MeanSchedule schedule;
  double budget = 0.0;
  double measured_variation = 0.0;
};

struct RewardSample {
  std::size_t t = 0;
  std::size_t arm = 0;
  double value = 0.0;
};

/// Two arms at `hi`/`lo` that swap at floor(k T / p), k = 1..p-1.
AbruptEnvironment make_flip_env(std::size_t horizon, std::size_t segments, double hi, double lo);

/// Two antiphase arms 0.5 +/- A sin(w t) over the first ceil(rho T) steps,
/// constant afterwards, with w chosen so the variation lands in
/// [0.95 V_T, V_T]. V_T = 0 gives the constant 0.5/0.5 schedule.
DriftingEnvironment make_sinusoidal_env(std::size_t horizon, double budget, double amplitude,
                                        double active_fraction);

/// Sum over t in [1, T-1] of max_a |mu_t(a) - mu_{t+1}(a)|, compensated summation.
double variation_of(const MeanSchedule& schedule);

/// Bernoulli(mu_t(arm)) draw; consumes exactly one uniform.
RewardSample sample_reward(const MeanSchedule& schedule, std::size_t t, std::size_t arm, Rng& rng);

/// CSV with header `t,arm,mean`, one line per (t, arm), arm 1-indexed.
void write_schedule_csv(std::ostream& out, const MeanSchedule& schedule);
MeanSchedule read_schedule_csv(std::istream& in);

}  // namespace driftbandit
