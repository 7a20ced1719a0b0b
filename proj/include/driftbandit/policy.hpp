#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "driftbandit/rng.hpp"

namespace driftbandit {

enum class PolicyKind { Ucb1, Ducb, Swucb, EpsGreedy, Thompson };

std::string_view to_string(PolicyKind kind) noexcept;
/// Accepts "UCB1", "DUCB", "SWUCB", "EpsGreedy", "Thompson".
PolicyKind parse_policy_kind(std::string_view name);

struct PolicyParams {
  PolicyKind kind = PolicyKind::Ucb1;
  double xi = 0.6;       // confidence constant (DUCB, SWUCB)
  double gamma = 1.0;    // discount (DUCB)
  std::size_t tau = 1;   // window length (SWUCB)
  double eps_c = 5.0;    // eps_t = min(1, eps_c * K / t)
  double prior_a = 1.0;  // Beta prior (Thompson)
  double prior_b = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Plain counts and sums (UCB1, eps-greedy).
struct SimpleState {
  std::vector<std::uint64_t> count;
  std::vector<double> sum;
};

/// Discounted statistics, decayed by gamma on every observation.
struct DucbState {
  double gamma = 1.0;
  double xi = 0.6;
  std::vector<double> disc_count;  // N_t(gamma, a)
  std::vector<double> disc_sum;
  double disc_total = 0.0;         // n_t(gamma)
  std::vector<std::uint64_t> raw_count;
};

/// Last tau (arm, reward) pairs plus per-arm window counters.
struct SwucbState {
  struct Pull {
    std::size_t arm;
    double reward;
  };
  double xi = 0.6;
  std::size_t tau = 1;
  std::vector<Pull> window;  // ring buffer, capacity tau
  std::size_t head = 0;      // oldest entry once full
  std::vector<std::uint64_t> win_count;
  std::vector<double> win_sum;
  std::vector<std::uint64_t> raw_count;

  /// Window contents oldest first.
  std::vector<Pull> contents() const;
};

struct ThompsonState {
  double prior_a = 1.0;
  double prior_b = 1.0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::uint64_t> raw_count;
};

using PolicyState = std::variant<SimpleState, DucbState, SwucbState, ThompsonState>;

/// Arm-selection policy with incremental statistics.
///
/// The first K recommendations are the forced round-robin 0, 1, ..., K-1.
/// After that, recommend() applies the policy's rule; greedy_arm() and
/// estimate() expose the policy's own mean estimator (discounted mean for
/// DUCB, windowed mean for SWUCB, posterior mean for Thompson, plain mean
/// otherwise). Ties always go to the lowest arm index.
class Policy {
 public:
  Policy(const PolicyParams& params, std::size_t arms);

  const PolicyParams& params() const noexcept { return params_; }
  std::size_t arms() const noexcept { return arms_; }
  /// Observations so far.
  std::size_t steps() const noexcept { return steps_; }
  /// True once the forced round-robin is complete.
  bool initialized() const noexcept { return steps_ >= arms_; }

  /// Consumes randomness only for eps-greedy and Thompson.
  std::size_t recommend(Rng& rng) const;

  /// Rewards may exceed 1 under drift. Thompson consumes one uniform here.
  void observe(std::size_t arm, double reward, Rng& rng);

  std::size_t greedy_arm() const;
  double estimate(std::size_t arm) const;

  /// UCB-family exploration bonus c_t(a); +inf for an arm with zero
  /// (windowed) count. Throws for eps-greedy and Thompson.
  double confidence_radius(std::size_t arm) const;
  /// estimate + confidence_radius.
  double index(std::size_t arm) const;

  /// Undiscounted pulls N_t(a) since construction.
  std::uint64_t pulls(std::size_t arm) const;

  const PolicyState& state() const noexcept { return state_; }

  /// `{"kind":..., "t":..., "per_arm":[...]}` with stable field order.
  std::string dump_json() const;

 private:
  void check_arm(std::size_t arm) const;
  std::size_t argmax_estimate() const;
  std::size_t argmax_index() const;

  PolicyParams params_;
  std::size_t arms_;
  std::size_t steps_ = 0;
  PolicyState state_;
};

}  // namespace driftbandit
