#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftbandit/config.hpp"
#include "driftbandit/policy.hpp"

namespace driftbandit {

/// Reference abrupt-environment results, one row per breakpoint count.
struct AbruptReference {
  std::size_t beta_T;
  double gamma_c;
  double tau_c;
  double R_U, R_S, R_D;
  double C_U, C_S, C_D;
};

inline constexpr std::array<AbruptReference, 7> kAbruptReference{{
    {1, 15, 1.00, 275.2, 135.1, 142.7, 42.1, 53.2, 64.2},
    {2, 10, 1.00, 364.2, 203.5, 205.7, 42.5, 70.7, 92.3},
    {3, 15, 1.00, 430.4, 239.5, 247.1, 41.6, 81.2, 82.8},
    {4, 15, 0.95, 394.8, 264.1, 259.7, 41.4, 95.1, 89.2},
    {5, 10, 1.00, 423.7, 288.9, 302.4, 39.8, 100.8, 112.3},
    {6, 25, 1.00, 481.8, 330.1, 279.1, 38.5, 107.9, 67.6},
    {7, 30, 0.95, 484.2, 339.0, 299.7, 38.6, 117.1, 59.2},
}};

/// Reference variation-budget results, one column per V_T.
struct BudgetReference {
  double budget;
  double R_U, C_U;
  double R_EG, C_EG;
  double R_T, C_T;
};

inline constexpr std::array<BudgetReference, 7> kBudgetReference{{
    {3, 156.1, 88.9, 143.1, 37.3, 125.1, 48.4},
    {6, 175.9, 107.4, 164.1, 52.4, 147.2, 69.0},
    {9, 185.7, 119.8, 180.2, 64.1, 163.8, 84.9},
    {12, 191.4, 127.2, 192.0, 73.6, 177.8, 97.5},
    {15, 198.3, 135.0, 202.3, 80.7, 185.9, 107.5},
    {18, 207.5, 145.6, 215.0, 88.7, 197.8, 118.1},
    {24, 210.3, 149.8, 229.0, 99.5, 211.6, 132.2},
}};

/// Lipschitz constants of the linear drift sensitivity sweep.
inline constexpr std::array<double, 6> kDriftGrid{0.0, 0.05, 0.1, 0.25, 0.5, 1.0};

/// Flip environment 0.99/0.01, T = 5000, 100 reps, beta_T + 1 segments,
/// gamma/tau tuned from the given constants, linear drift l.
ExperimentConfig abrupt_preset(std::size_t beta_T, PolicyKind kind, double gamma_c, double tau_c,
                               double drift);

/// Sinusoidal environment (A = 0.3) with budget V_T, T = 5000, 2000 reps,
/// restarts sized with lambda = 1, linear drift l. eps_c = 2.
ExperimentConfig budget_preset(double budget, PolicyKind kind, double drift,
                               double active_fraction = 1.0);

struct ComparisonRow {
  std::string column;  // e.g. "beta_T=1" or "V_T=3"
  std::string metric;  // e.g. "R_U"
  double reference = 0.0;
  double produced = 0.0;  // pseudo-regret for R_*, compensation for C_*
  double se = 0.0;
  double realized = 0.0;  // realized regret for R_*, equal to produced for C_*

  double relative_deviation() const { return (produced - reference) / reference; }
};

struct ReproduceOptions {
  std::filesystem::path out_dir = ".";
  std::size_t workers = 1;
  std::uint64_t base_seed = 1;
  double drift = 0.1;
};

struct ReproduceReport {
  std::string target;
  std::vector<ComparisonRow> rows;
  std::vector<std::filesystem::path> files;
};

std::span<const std::string_view> reproduce_targets() noexcept;
bool is_reproduce_target(std::string_view target) noexcept;

/// Runs the presets of `target` and writes its tables, plot CSVs and SVGs
/// under out_dir. Throws std::invalid_argument for an unknown target.
ReproduceReport reproduce(std::string_view target, const ReproduceOptions& options);

/// column,metric,reference,produced,stderr,realized,rel_dev
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace driftbandit
