#include "driftbandit/incentive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace driftbandit {

std::string_view to_string(DriftKind kind) noexcept {
  return kind == DriftKind::Linear ? "linear" : "saturating";
}

DriftKind parse_drift_kind(std::string_view name) {
  if (name == "linear") return DriftKind::Linear;
  if (name == "saturating") return DriftKind::Saturating;
  throw std::invalid_argument("unknown drift kind '" + std::string(name) +
                              "' (expected linear or saturating)");
}

void DriftModel::validate() const {
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
    throw std::invalid_argument("l: Lipschitz constant must be finite and >= 0");
  }
  if (kind == DriftKind::Saturating && !(cap >= 0.0 && std::isfinite(cap))) {
    throw std::invalid_argument("cap: saturation level must be finite and >= 0");
  }
}

double DriftModel::apply(double chi) const {
  if (!(chi >= 0.0)) throw std::invalid_argument("drift: compensation must be >= 0");
  if (kind == DriftKind::Saturating) return lipschitz * std::min(chi, cap);
  return lipschitz * chi;
}

StepOutcome incentive_step(Policy& policy, const MeanSchedule& schedule, std::size_t t,
                           const DriftModel& model, Rng& rng) {
  StepOutcome out;
  out.t = t;
  out.recommended = policy.recommend(rng);
  out.greedy = policy.initialized() ? policy.greedy_arm() : out.recommended;
  if (out.recommended != out.greedy) {
    // Nonnegative because greedy maximizes the same estimator.
    out.compensation = policy.estimate(out.greedy) - policy.estimate(out.recommended);
    out.drift = model.apply(out.compensation);
  }
  out.true_reward = sample_reward(schedule, t, out.recommended, rng).value;
  out.observed_reward = out.true_reward + out.drift;
  policy.observe(out.recommended, out.observed_reward, rng);
  return out;
}

}  // namespace driftbandit
