#pragma once

#include <cstddef>
#include <string_view>

#include "driftbandit/env.hpp"
#include "driftbandit/policy.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

enum class DriftKind { Linear, Saturating };

std::string_view to_string(DriftKind kind) noexcept;
/// Accepts "linear" or "saturating".
DriftKind parse_drift_kind(std::string_view name);

/// Feedback bias f(chi): nondecreasing, f(0) = 0, Lipschitz with constant l.
struct DriftModel {
  DriftKind kind = DriftKind::Linear;
  double lipschitz = 0.0;
  double cap = 1.0;  // Saturating only

  void validate() const;
  /// Linear: l * chi. Saturating: l * min(chi, cap). Rejects chi < 0.
  double apply(double chi) const;

  friend bool operator==(const DriftModel&, const DriftModel&) = default;
};

/// One principal/agent interaction.
struct StepOutcome {
  std::size_t t = 0;            // global step, 1-indexed
  std::size_t batch = 1;        // restart batch, 1-indexed
  std::size_t recommended = 0;  // a_t
  std::size_t greedy = 0;       // g_t (equals a_t during the forced round-robin)
  double compensation = 0.0;    // chi_t
  double drift = 0.0;           // delta_t
  double true_reward = 0.0;     // X_t(a_t)
  double observed_reward = 0.0; // r_t = X_t(a_t) + delta_t
};

/// Executes one step of the incentivized loop at global step t:
/// recommend, compare with the greedy arm, pay chi = estimate(g) - estimate(a)
/// when they differ, bias the sampled reward by f(chi) and feed it back.
/// No compensation is paid during the forced round-robin.
StepOutcome incentive_step(Policy& policy, const MeanSchedule& schedule, std::size_t t,
                           const DriftModel& model, Rng& rng);

}  // namespace driftbandit
