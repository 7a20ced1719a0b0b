#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "driftbandit/env.hpp"
#include "driftbandit/incentive.hpp"
#include "driftbandit/policy.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

struct RestartParams {
  std::size_t sigma = 1;  // batch size
  double lambda = 1.0;    // worst-case regret constant of the restarted policy
};

/// (lambda T / V_T)^(2/3) * (K ln T)^(1/3), before flooring.
double batch_size_unrounded(std::size_t horizon, double budget, std::size_t arms, double lambda);

/// max(1, floor(batch_size_unrounded)) clamped to T. Requires T >= 2, K >= 2,
/// lambda > 0 and V_T in [1/K, T/K].
std::size_t batch_size(std::size_t horizon, double budget, std::size_t arms, double lambda);

/// Steps first..last inclusive, 1-indexed.
struct Batch {
  std::size_t index;
  std::size_t first;
  std::size_t last;
};

/// ceil(T / sigma) disjoint batches covering [1, T]; the last one is truncated.
std::vector<Batch> partition_horizon(std::size_t horizon, std::size_t sigma);

/// Incentivized loop with a fresh policy at the start of every batch.
/// `sink` receives every StepOutcome in order. sigma >= T is the plain loop.
template <class Sink>
void run_restarting(const MeanSchedule& schedule, std::size_t sigma, const PolicyParams& params,
                    const DriftModel& model, Rng& rng, Sink&& sink) {
  for (const Batch& batch : partition_horizon(schedule.horizon(), sigma)) {
    Policy policy(params, schedule.arms());
    for (std::size_t t = batch.first; t <= batch.last; ++t) {
      StepOutcome out = incentive_step(policy, schedule, t, model, rng);
      out.batch = batch.index;
      sink(out);
    }
  }
}

std::vector<StepOutcome> run_restarting(const MeanSchedule& schedule, const RestartParams& restart,
                                        const PolicyParams& params, const DriftModel& model,
                                        Rng& rng);

/// The incentivized loop without restarts.
std::vector<StepOutcome> run_incentivized(const MeanSchedule& schedule, const PolicyParams& params,
                                          const DriftModel& model, Rng& rng);

}  // namespace driftbandit
