#include "driftbandit/restart.hpp"

#include <cmath>
#include <stdexcept>

namespace driftbandit {

double batch_size_unrounded(std::size_t horizon, double budget, std::size_t arms, double lambda) {
  if (horizon < 2) throw std::invalid_argument("batch size: T must be >= 2");
  if (arms < 2) throw std::invalid_argument("batch size: K must be >= 2");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("batch size: lambda must be > 0");
  }
  const double T = static_cast<double>(horizon);
  const double K = static_cast<double>(arms);
  if (!(budget >= 1.0 / K && budget <= T / K)) {
    throw std::invalid_argument("batch size: V_T must lie in [1/K, T/K]");
  }
  return std::cbrt(std::pow(lambda * T / budget, 2.0)) * std::cbrt(K * std::log(T));
}

std::size_t batch_size(std::size_t horizon, double budget, std::size_t arms, double lambda) {
  const double raw = std::floor(batch_size_unrounded(horizon, budget, arms, lambda));
  if (raw >= static_cast<double>(horizon)) return horizon;
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::vector<Batch> partition_horizon(std::size_t horizon, std::size_t sigma) {
  if (sigma == 0) throw std::invalid_argument("restart: batch size sigma must be >= 1");
  std::vector<Batch> out;
  for (std::size_t first = 1, j = 1; first <= horizon; first += sigma, ++j) {
    out.push_back({j, first, std::min(horizon, first + sigma - 1)});
  }
  return out;
}

std::vector<StepOutcome> run_restarting(const MeanSchedule& schedule, const RestartParams& restart,
                                        const PolicyParams& params, const DriftModel& model,
                                        Rng& rng) {
  model.validate();
  std::vector<StepOutcome> out;
  out.reserve(schedule.horizon());
  run_restarting(schedule, restart.sigma, params, model, rng,
                 [&out](const StepOutcome& s) { out.push_back(s); });
  return out;
}

std::vector<StepOutcome> run_incentivized(const MeanSchedule& schedule, const PolicyParams& params,
                                          const DriftModel& model, Rng& rng) {
  return run_restarting(schedule, RestartParams{schedule.horizon(), 1.0}, params, model, rng);
}

}  // namespace driftbandit
