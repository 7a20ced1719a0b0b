#include "driftbandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace driftbandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_or_zero(double sum, double count) { return count > 0.0 ? sum / count : 0.0; }

}  // namespace

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::Ucb1: return "UCB1";
    case PolicyKind::Ducb: return "DUCB";
    case PolicyKind::Swucb: return "SWUCB";
    case PolicyKind::EpsGreedy: return "EpsGreedy";
    case PolicyKind::Thompson: return "Thompson";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::Ucb1, PolicyKind::Ducb, PolicyKind::Swucb, PolicyKind::EpsGreedy,
                    PolicyKind::Thompson}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown policy kind '" + std::string(name) +
                              "' (expected UCB1, DUCB, SWUCB, EpsGreedy or Thompson)");
}

void PolicyParams::validate() const {
  const bool ucb_family = kind == PolicyKind::Ducb || kind == PolicyKind::Swucb;
  // xi = 1/2 is admitted so DUCB(gamma = 1) and SWUCB can be matched against UCB1.
  if (ucb_family && !(xi >= 0.5 && std::isfinite(xi))) {
    throw std::invalid_argument("xi: must be >= 0.5 for DUCB/SWUCB");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma: must lie in (0, 1]");
  if (tau < 1) throw std::invalid_argument("tau: must be >= 1");
  if (!(eps_c > 0.0 && std::isfinite(eps_c))) throw std::invalid_argument("eps_c: must be > 0");
  if (!(prior_a > 0.0 && std::isfinite(prior_a))) throw std::invalid_argument("prior_a: must be > 0");
  if (!(prior_b > 0.0 && std::isfinite(prior_b))) throw std::invalid_argument("prior_b: must be > 0");
}

std::vector<SwucbState::Pull> SwucbState::contents() const {
  std::vector<Pull> out;
  out.reserve(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) out.push_back(window[(head + i) % window.size()]);
  return out;
}

Policy::Policy(const PolicyParams& params, std::size_t arms) : params_(params), arms_(arms) {
  if (arms < 2) throw std::invalid_argument("policy needs K >= 2 arms");
  params_.validate();
  switch (params_.kind) {
    case PolicyKind::Ucb1:
    case PolicyKind::EpsGreedy:
      state_ = SimpleState{std::vector<std::uint64_t>(arms, 0), std::vector<double>(arms, 0.0)};
      break;
    case PolicyKind::Ducb:
      state_ = DucbState{params_.gamma, params_.xi, std::vector<double>(arms, 0.0),
                         std::vector<double>(arms, 0.0), 0.0, std::vector<std::uint64_t>(arms, 0)};
      break;
    case PolicyKind::Swucb: {
      SwucbState s;
      s.xi = params_.xi;
      s.tau = params_.tau;
      s.window.reserve(std::min<std::size_t>(params_.tau, 1u << 20));
      s.win_count.assign(arms, 0);
      s.win_sum.assign(arms, 0.0);
      s.raw_count.assign(arms, 0);
      state_ = std::move(s);
      break;
    }
    case PolicyKind::Thompson:
      state_ = ThompsonState{params_.prior_a, params_.prior_b,
                             std::vector<double>(arms, params_.prior_a),
                             std::vector<double>(arms, params_.prior_b),
                             std::vector<std::uint64_t>(arms, 0)};
      break;
  }
}

void Policy::check_arm(std::size_t arm) const {
  if (arm >= arms_) throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
}

double Policy::estimate(std::size_t arm) const {
  check_arm(arm);
  return std::visit(
      [arm](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SimpleState>) {
          return ratio_or_zero(s.sum[arm], static_cast<double>(s.count[arm]));
        } else if constexpr (std::is_same_v<S, DucbState>) {
          return ratio_or_zero(s.disc_sum[arm], s.disc_count[arm]);
        } else if constexpr (std::is_same_v<S, SwucbState>) {
          return ratio_or_zero(s.win_sum[arm], static_cast<double>(s.win_count[arm]));
        } else {
          return s.alpha[arm] / (s.alpha[arm] + s.beta[arm]);
        }
      },
      state_);
}

double Policy::confidence_radius(std::size_t arm) const {
  check_arm(arm);
  // All three radii are written as sqrt(c * log(n) / N) with identical
  // operation order, so DUCB(gamma = 1, xi = 1/2) and SWUCB(tau >= T, xi = 2)
  // reproduce UCB1 bit for bit.
  if (const auto* s = std::get_if<DucbState>(&state_)) {
    if (s->disc_count[arm] <= 0.0) return kInf;
    const double c = 4.0 * s->xi;
    return std::sqrt(c * std::log(s->disc_total) / s->disc_count[arm]);
  }
  if (const auto* s = std::get_if<SwucbState>(&state_)) {
    if (s->win_count[arm] == 0) return kInf;
    const double horizon = static_cast<double>(std::min(steps_, s->tau));
    return std::sqrt(s->xi * std::log(horizon) / static_cast<double>(s->win_count[arm]));
  }
  if (params_.kind == PolicyKind::Ucb1) {
    const auto& s = std::get<SimpleState>(state_);
    if (s.count[arm] == 0) return kInf;
    return std::sqrt(2.0 * std::log(static_cast<double>(steps_)) / static_cast<double>(s.count[arm]));
  }
  throw std::logic_error("confidence_radius: not a UCB-family policy");
}

double Policy::index(std::size_t arm) const {
  const double radius = confidence_radius(arm);
  return radius == kInf ? kInf : estimate(arm) + radius;
}

std::uint64_t Policy::pulls(std::size_t arm) const {
  check_arm(arm);
  return std::visit(
      [arm](const auto& s) -> std::uint64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SimpleState>) {
          return s.count[arm];
        } else {
          return s.raw_count[arm];
        }
      },
      state_);
}

std::size_t Policy::argmax_estimate() const {
  std::size_t best = 0;
  double best_value = estimate(0);
  for (std::size_t a = 1; a < arms_; ++a) {
    const double v = estimate(a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

std::size_t Policy::argmax_index() const {
  std::size_t best = 0;
  double best_value = -kInf;
  for (std::size_t a = 0; a < arms_; ++a) {
    const double v = index(a);
    if (v == kInf) return a;
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

std::size_t Policy::recommend(Rng& rng) const {
  if (!initialized()) return steps_;
  switch (params_.kind) {
    case PolicyKind::Ucb1:
    case PolicyKind::Ducb:
    case PolicyKind::Swucb:
      return argmax_index();
    case PolicyKind::EpsGreedy: {
      const double t = static_cast<double>(steps_ + 1);
      const double eps = std::min(1.0, params_.eps_c * static_cast<double>(arms_) / t);
      if (rng.uniform() < eps) return rng.index(arms_);
      return argmax_estimate();
    }
    case PolicyKind::Thompson: {
      const auto& s = std::get<ThompsonState>(state_);
      std::size_t best = 0;
      double best_value = -kInf;
      for (std::size_t a = 0; a < arms_; ++a) {
        const double theta = rng.beta(s.alpha[a], s.beta[a]);
        if (theta > best_value) {
          best = a;
          best_value = theta;
        }
      }
      return best;
    }
  }
  return 0;
}

void Policy::observe(std::size_t arm, double reward, Rng& rng) {
  check_arm(arm);
  if (!(reward >= 0.0) || !std::isfinite(reward)) {
    throw std::invalid_argument("observe: reward must be finite and nonnegative");
  }
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SimpleState>) {
          ++s.count[arm];
          s.sum[arm] += reward;
        } else if constexpr (std::is_same_v<S, DucbState>) {
          for (std::size_t a = 0; a < arms_; ++a) {
            s.disc_count[a] *= s.gamma;
            s.disc_sum[a] *= s.gamma;
          }
          s.disc_count[arm] += 1.0;
          s.disc_sum[arm] += reward;
          s.disc_total = s.gamma * s.disc_total + 1.0;
          ++s.raw_count[arm];
        } else if constexpr (std::is_same_v<S, SwucbState>) {
          if (s.window.size() < s.tau) {
            s.window.push_back({arm, reward});
          } else {
            auto& oldest = s.window[s.head];
            --s.win_count[oldest.arm];
            s.win_sum[oldest.arm] -= oldest.reward;
            if (s.win_count[oldest.arm] == 0) s.win_sum[oldest.arm] = 0.0;
            oldest = {arm, reward};
            s.head = (s.head + 1) % s.tau;
          }
          ++s.win_count[arm];
          s.win_sum[arm] += reward;
          ++s.raw_count[arm];
        } else {
          const double clipped = std::min(reward, 1.0);
          const double success = rng.uniform() < clipped ? 1.0 : 0.0;
          s.alpha[arm] += success;
          s.beta[arm] += 1.0 - success;
          ++s.raw_count[arm];
        }
      },
      state_);
  ++steps_;
}

std::size_t Policy::greedy_arm() const {
  if (!initialized()) throw std::logic_error("greedy_arm: forced round-robin not complete");
  return argmax_estimate();
}

std::string Policy::dump_json() const {
  nlohmann::ordered_json out;
  out["kind"] = std::string(to_string(params_.kind));
  out["t"] = steps_;
  auto per_arm = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < arms_; ++a) {
    nlohmann::ordered_json row;
    row["arm"] = a + 1;
    row["pulls"] = pulls(a);
    row["estimate"] = estimate(a);
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, SimpleState>) {
            row["sum"] = s.sum[a];
          } else if constexpr (std::is_same_v<S, DucbState>) {
            row["disc_count"] = s.disc_count[a];
            row["disc_sum"] = s.disc_sum[a];
          } else if constexpr (std::is_same_v<S, SwucbState>) {
            row["win_count"] = s.win_count[a];
            row["win_sum"] = s.win_sum[a];
          } else {
            row["alpha"] = s.alpha[a];
            row["beta"] = s.beta[a];
          }
        },
        state_);
    per_arm.push_back(std::move(row));
  }
  out["per_arm"] = std::move(per_arm);
  if (const auto* s = std::get_if<DucbState>(&state_)) out["disc_total"] = s->disc_total;
  return out.dump();
}

}  // namespace driftbandit
