#include "driftbandit/env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace driftbandit {

MeanSchedule::MeanSchedule(std::size_t arms, std::size_t horizon, std::vector<double> means)
    : arms_(arms), horizon_(horizon), means_(std::move(means)) {
  if (arms_ == 0 || horizon_ == 0) throw std::invalid_argument("schedule needs K >= 1 and T >= 1");
  if (means_.size() != arms_ * horizon_) {
    throw std::invalid_argument("schedule table has " + std::to_string(means_.size()) +
                                " entries, expected K*T = " + std::to_string(arms_ * horizon_));
  }
  for (std::size_t i = 0; i < means_.size(); ++i) {
    const double m = means_[i];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("mean at t=" + std::to_string(i / arms_ + 1) +
                                  ", arm=" + std::to_string(i % arms_ + 1) + " outside [0,1]");
    }
  }
}

void MeanSchedule::check_step(std::size_t t) const {
  if (t < 1 || t > horizon_) {
    throw std::out_of_range("step " + std::to_string(t) + " outside [1, " +
                            std::to_string(horizon_) + "]");
  }
}

double MeanSchedule::mean(std::size_t t, std::size_t arm) const {
  check_step(t);
  if (arm >= arms_) throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
  return means_[(t - 1) * arms_ + arm];
}

std::span<const double> MeanSchedule::means_at(std::size_t t) const {
  check_step(t);
  return {row(t), arms_};
}

std::size_t MeanSchedule::optimal_arm(std::size_t t) const {
  const auto row = means_at(t);
  // max_element returns the first maximum.
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

double MeanSchedule::optimal_mean(std::size_t t) const { return means_at(t)[optimal_arm(t)]; }

AbruptEnvironment make_flip_env(std::size_t horizon, std::size_t segments, double hi, double lo) {
  if (segments == 0) throw std::invalid_argument("flip env: segment count p must be >= 1");
  if (horizon < segments) throw std::invalid_argument("flip env: horizon T must be >= p");
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    throw std::invalid_argument("flip env: need 0 <= lo < hi <= 1");
  }
  std::vector<std::size_t> breakpoints;
  for (std::size_t k = 1; k < segments; ++k) breakpoints.push_back(k * horizon / segments);

  std::vector<double> means(2 * horizon);
  std::size_t next = 0;
  bool flipped = false;
  for (std::size_t t = 1; t <= horizon; ++t) {
    means[2 * (t - 1)] = flipped ? lo : hi;
    means[2 * (t - 1) + 1] = flipped ? hi : lo;
    while (next < breakpoints.size() && breakpoints[next] == t) {
      flipped = !flipped;
      ++next;
    }
  }
  return {MeanSchedule(2, horizon, std::move(means)), std::move(breakpoints)};
}

namespace {

MeanSchedule sinusoid(std::size_t horizon, std::size_t active, double amplitude, double omega) {
  std::vector<double> means(2 * horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double s = amplitude * std::sin(omega * static_cast<double>(std::min(t, active)));
    means[2 * (t - 1)] = 0.5 + s;
    means[2 * (t - 1) + 1] = 0.5 - s;
  }
  return MeanSchedule(2, horizon, std::move(means));
}

}  // namespace

DriftingEnvironment make_sinusoidal_env(std::size_t horizon, double budget, double amplitude,
                                        double active_fraction) {
  constexpr std::size_t kArms = 2;
  if (horizon < 2) throw std::invalid_argument("sinusoidal env: horizon T must be >= 2");
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("sinusoidal env: budget V_T must be a finite value >= 0");
  }
  if (!(amplitude > 0.0 && amplitude <= 0.5)) {
    throw std::invalid_argument("sinusoidal env: amplitude must lie in (0, 0.5]");
  }
  if (!(active_fraction > 0.0 && active_fraction <= 1.0)) {
    throw std::invalid_argument("sinusoidal env: active fraction must lie in (0, 1]");
  }
  if (static_cast<double>(kArms) * budget > static_cast<double>(horizon)) {
    throw std::invalid_argument("sinusoidal env: budget violates K * V_T <= T");
  }
  if (budget == 0.0) {
    auto schedule = sinusoid(horizon, horizon, amplitude, 0.0);
    return {std::move(schedule), 0.0, 0.0};
  }
  const double periods = budget / (4.0 * amplitude);
  if (periods < 0.25) {
    throw std::invalid_argument("sinusoidal env: budget needs fewer than a quarter period "
                                "(V_T < A); it cannot be exhausted by an oscillation");
  }
  const auto active = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(active_fraction * static_cast<double>(horizon) - 1e-9)));
  const std::size_t steps = std::min(active, horizon);

  auto variation_at = [&](double omega) {
    return variation_of(sinusoid(horizon, steps, amplitude, omega));
  };

  double omega = 2.0 * std::numbers::pi * periods / static_cast<double>(steps);
  double measured = variation_at(omega);
  if (measured > budget || measured < 0.95 * budget) {
    // Largest frequency whose sampled variation stays within budget.
    double lo = 0.0;
    double hi = omega;
    for (int i = 0; i < 64 && variation_at(hi) <= budget; ++i) hi *= 1.25;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (variation_at(mid) <= budget ? lo : hi) = mid;
    }
    omega = lo;
    measured = variation_at(omega);
  }
  if (measured < 0.95 * budget) {
    throw std::invalid_argument("sinusoidal env: sampling too coarse to exhaust the budget");
  }
  return {sinusoid(horizon, steps, amplitude, omega), budget, measured};
}

double variation_of(const MeanSchedule& schedule) {
  // Neumaier summation: the result is the correctly rounded sum in practice,
  // so k equal jumps of size x give exactly k * x.
  double sum = 0.0;
  double carry = 0.0;
  const std::size_t arms = schedule.arms();
  for (std::size_t t = 1; t < schedule.horizon(); ++t) {
    const double* now = schedule.row(t);
    const double* next = schedule.row(t + 1);
    double change = 0.0;
    for (std::size_t a = 0; a < arms; ++a) change = std::max(change, std::abs(now[a] - next[a]));
    const double s = sum + change;
    if (std::abs(sum) >= std::abs(change)) {
      carry += (sum - s) + change;
    } else {
      carry += (change - s) + sum;
    }
    sum = s;
  }
  return sum + carry;
}

RewardSample sample_reward(const MeanSchedule& schedule, std::size_t t, std::size_t arm, Rng& rng) {
  const double mu = schedule.mean(t, arm);
  return {t, arm, rng.uniform() < mu ? 1.0 : 0.0};
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

void write_schedule_csv(std::ostream& out, const MeanSchedule& schedule) {
  out << "t,arm,mean\n";
  for (std::size_t t = 1; t <= schedule.horizon(); ++t) {
    for (std::size_t a = 0; a < schedule.arms(); ++a) {
      out << t << ',' << a + 1 << ',' << format_double(schedule.row(t)[a]) << '\n';
    }
  }
}

MeanSchedule read_schedule_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,arm,mean") {
    throw std::invalid_argument("schedule csv: expected header 't,arm,mean'");
  }
  struct Entry {
    std::size_t t, arm;
    double mean;
  };
  std::vector<Entry> entries;
  std::size_t arms = 0;
  std::size_t horizon = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string t_s, arm_s, mean_s;
    if (!std::getline(fields, t_s, ',') || !std::getline(fields, arm_s, ',') ||
        !std::getline(fields, mean_s)) {
      throw std::invalid_argument("schedule csv line " + std::to_string(lineno) + ": malformed");
    }
    Entry e{};
    const auto bad = [&] {
      return std::invalid_argument("schedule csv line " + std::to_string(lineno) + ": bad field");
    };
    if (std::from_chars(t_s.data(), t_s.data() + t_s.size(), e.t).ec != std::errc{}) throw bad();
    if (std::from_chars(arm_s.data(), arm_s.data() + arm_s.size(), e.arm).ec != std::errc{}) throw bad();
    if (std::from_chars(mean_s.data(), mean_s.data() + mean_s.size(), e.mean).ec != std::errc{}) throw bad();
    if (e.t == 0 || e.arm == 0) throw bad();
    arms = std::max(arms, e.arm);
    horizon = std::max(horizon, e.t);
    entries.push_back(e);
  }
  if (entries.size() != arms * horizon) {
    throw std::invalid_argument("schedule csv: table has gaps or duplicates");
  }
  std::vector<double> means(arms * horizon, -1.0);
  for (const auto& e : entries) {
    double& slot = means[(e.t - 1) * arms + (e.arm - 1)];
    if (slot != -1.0) throw std::invalid_argument("schedule csv: duplicate (t, arm)");
    slot = e.mean;
  }
  return MeanSchedule(arms, horizon, std::move(means));
}

}  // namespace driftbandit
