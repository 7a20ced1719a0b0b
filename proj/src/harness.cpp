#include "driftbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "driftbandit/restart.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

double tuned_gamma(std::size_t beta_T, std::size_t horizon, double gamma_c) {
  if (horizon < 2) throw std::invalid_argument("tuned_gamma: T must be >= 2");
  if (!(gamma_c > 0.0)) throw std::invalid_argument("tuned_gamma: gamma_c must be > 0");
  const double beta = static_cast<double>(std::max<std::size_t>(beta_T, 1));
  const double gamma = 1.0 - std::sqrt(beta / static_cast<double>(horizon)) / gamma_c;
  return std::clamp(gamma, 1e-12, std::nextafter(1.0, 0.0));
}

std::size_t tuned_tau(std::size_t beta_T, std::size_t horizon, double tau_c) {
  if (horizon < 2) throw std::invalid_argument("tuned_tau: T must be >= 2");
  if (!(tau_c > 0.0)) throw std::invalid_argument("tuned_tau: tau_c must be > 0");
  const double beta = static_cast<double>(std::max<std::size_t>(beta_T, 1));
  const double T = static_cast<double>(horizon);
  const double tau = std::floor(tau_c * std::sqrt(T * std::log(T) / beta));
  if (tau < 1.0) return 1;
  if (tau > T) return horizon;
  return static_cast<std::size_t>(tau);
}

Scenario build_scenario(const ExperimentConfig& config) {
  config.validate();
  Scenario s{MeanSchedule(1, 1, {0.0}), {}, 0.0, config.policy.params, config.T};
  try {
    if (config.env.kind == EnvKind::Flip) {
      auto env = make_flip_env(config.T, config.env.segments, config.env.hi, config.env.lo);
      s.schedule = std::move(env.schedule);
      s.breakpoints = std::move(env.breakpoints);
      s.budget = variation_of(s.schedule);
    } else {
      auto env = make_sinusoidal_env(config.T, config.env.budget, config.env.amplitude,
                                     config.env.active_fraction);
      s.schedule = std::move(env.schedule);
      s.budget = env.budget;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("env", e.what());
  }
  const std::size_t beta_T = s.breakpoints.size();
  if (config.policy.gamma_c) s.policy.gamma = tuned_gamma(beta_T, config.T, *config.policy.gamma_c);
  if (config.policy.tau_c) s.policy.tau = tuned_tau(beta_T, config.T, *config.policy.tau_c);
  if (config.restart) {
    if (config.restart->sigma) {
      s.sigma = *config.restart->sigma;
    } else {
      try {
        s.sigma = batch_size(config.T, s.budget, config.K, config.restart->lambda);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("restart", e.what());
      }
    }
  }
  return s;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Metric summarize(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() == 1) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

namespace {

/// Runs one replication, handing (outcome, pseudo increment) to `sink`.
template <class Sink>
ReplicationResult replicate(const ExperimentConfig& config, const Scenario& scenario,
                            std::size_t rep, Sink&& sink) {
  ReplicationResult r;
  r.seed = replication_seed(config.base_seed, rep);
  Rng rng(r.seed);
  const MeanSchedule& schedule = scenario.schedule;
  run_restarting(schedule, scenario.sigma, scenario.policy, config.incentive, rng,
                 [&](const StepOutcome& out) {
                   const double best = schedule.optimal_mean(out.t);
                   const double pseudo = best - schedule.row(out.t)[out.recommended];
                   r.pseudo_regret += pseudo;
                   r.realized_regret += best - out.true_reward;
                   r.compensation += out.compensation;
                   r.total_reward += out.true_reward;
                   sink(out, r);
                 });
  return r;
}

struct CurveAccumulator {
  explicit CurveAccumulator(std::size_t horizon) : sum(4 * horizon, 0.0), sumsq(4 * horizon, 0.0) {}
  std::vector<double> sum;
  std::vector<double> sumsq;
};

}  // namespace

ReplicationResult run_replication(const ExperimentConfig& config, const Scenario& scenario,
                                  std::size_t rep) {
  return replicate(config, scenario, rep, [](const StepOutcome&, const ReplicationResult&) {});
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t rep) {
  return run_replication(config, build_scenario(config), rep);
}

std::vector<TraceRow> trace_replication(const ExperimentConfig& config, const Scenario& scenario,
                                        std::size_t rep) {
  std::vector<TraceRow> rows;
  rows.reserve(config.T);
  replicate(config, scenario, rep, [&](const StepOutcome& out, const ReplicationResult& r) {
    rows.push_back({rep, out, r.pseudo_regret, r.realized_regret, r.compensation});
  });
  return rows;
}

AggregateSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const Scenario scenario = build_scenario(config);
  const std::size_t reps = config.reps;
  const std::size_t horizon = config.T;
  constexpr std::size_t kBlock = 16;
  const std::size_t blocks = (reps + kBlock - 1) / kBlock;

  std::vector<ReplicationResult> results(reps);
  std::vector<CurveAccumulator> curve_blocks;
  if (options.curves) curve_blocks.assign(blocks, CurveAccumulator(horizon));

  std::atomic<std::size_t> next_block{0};
  auto worker = [&] {
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      for (std::size_t rep = b * kBlock; rep < std::min(reps, (b + 1) * kBlock); ++rep) {
        if (options.curves) {
          auto& acc = curve_blocks[b];
          results[rep] = replicate(config, scenario, rep,
                                   [&](const StepOutcome& out, const ReplicationResult& r) {
                                     const std::size_t i = 4 * (out.t - 1);
                                     const double v[4] = {r.pseudo_regret, r.realized_regret,
                                                          r.compensation, r.total_reward};
                                     for (std::size_t k = 0; k < 4; ++k) {
                                       acc.sum[i + k] += v[k];
                                       acc.sumsq[i + k] += v[k] * v[k];
                                     }
                                   });
        } else {
          results[rep] = run_replication(config, scenario, rep);
        }
      }
    }
  };

  std::size_t workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                             : options.workers;
  workers = std::min(workers, blocks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  AggregateSummary summary{config, scenario, reps, {}, {}, {}, {}, {}, std::nullopt};
  std::vector<double> column(reps);
  auto metric = [&](double ReplicationResult::*field) {
    for (std::size_t i = 0; i < reps; ++i) column[i] = results[i].*field;
    return summarize(column);
  };
  summary.pseudo_regret = metric(&ReplicationResult::pseudo_regret);
  summary.realized_regret = metric(&ReplicationResult::realized_regret);
  summary.compensation = metric(&ReplicationResult::compensation);
  summary.total_reward = metric(&ReplicationResult::total_reward);
  summary.seeds.reserve(reps);
  for (const auto& r : results) summary.seeds.push_back(r.seed);

  if (options.curves) {
    MeanCurves c;
    std::vector<double>* means[4] = {&c.pseudo_regret, &c.realized_regret, &c.compensation, &c.reward};
    std::vector<double>* ses[4] = {&c.pseudo_regret_se, &c.realized_regret_se, &c.compensation_se,
                                   &c.reward_se};
    for (std::size_t k = 0; k < 4; ++k) {
      means[k]->assign(horizon, 0.0);
      ses[k]->assign(horizon, 0.0);
    }
    const double n = static_cast<double>(reps);
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t k = 0; k < 4; ++k) {
        double s = 0.0;
        double sq = 0.0;
        for (const auto& acc : curve_blocks) {  // fixed block order
          s += acc.sum[4 * t + k];
          sq += acc.sumsq[4 * t + k];
        }
        const double mean = s / n;
        (*means[k])[t] = mean;
        if (reps > 1) {
          const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
          (*ses[k])[t] = std::sqrt(var / n);
        }
      }
    }
    summary.curves = std::move(c);
  }
  return summary;
}

SweepResult sweep(const ExperimentConfig& config, const SweepGrid& grid, std::size_t workers) {
  std::vector<ExperimentConfig> points;
  const auto kind = config.policy.params.kind;
  if (kind == PolicyKind::Ducb) {
    if (grid.gamma_c.empty()) throw std::invalid_argument("sweep: gamma_c grid is empty");
    for (double g : grid.gamma_c) {
      auto c = config;
      c.policy.gamma_c = g;
      points.push_back(c);
    }
  } else if (kind == PolicyKind::Swucb) {
    if (grid.tau_c.empty()) throw std::invalid_argument("sweep: tau_c grid is empty");
    for (double tc : grid.tau_c) {
      auto c = config;
      c.policy.tau_c = tc;
      points.push_back(c);
    }
  } else {
    points.push_back(config);
  }
  SweepResult result;
  for (const auto& c : points) {
    const auto summary = run_experiment(c, {workers, false});
    SweepRow row;
    row.gamma_c = kind == PolicyKind::Ducb ? c.policy.gamma_c : std::nullopt;
    row.tau_c = kind == PolicyKind::Swucb ? c.policy.tau_c : std::nullopt;
    row.gamma = summary.scenario.policy.gamma;
    row.tau = summary.scenario.policy.tau;
    row.pseudo_regret = summary.pseudo_regret;
    row.compensation = summary.compensation;
    if (!result.table.empty() && row.pseudo_regret.mean < result.table[result.best].pseudo_regret.mean) {
      result.best = result.table.size();
    }
    result.table.push_back(row);
  }
  return result;
}

SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  SlopeFit fit;
  if (xs.size() != ys.size()) throw std::invalid_argument("slope fit: x and y sizes differ");
  if (xs.size() < 3) {
    fit.degenerate = true;
    fit.reason = "fewer than 3 points";
    return fit;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      fit.degenerate = true;
      fit.reason = "nonpositive value at point " + std::to_string(i);
      return fit;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = pairwise_sum(lx) / n;
  const double my = pairwise_sum(ly) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) {
    fit.degenerate = true;
    fit.reason = "all horizons equal";
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

ScalingReport scaling_probe(const ExperimentConfig& base, std::span<const std::size_t> horizons,
                            std::size_t workers) {
  if (horizons.size() < 3) throw std::invalid_argument("scaling: need at least 3 horizons");
  ScalingReport report;
  std::vector<double> xs;
  for (std::size_t T : horizons) {
    auto c = base;
    c.T = T;
    const auto summary = run_experiment(c, {workers, false});
    report.horizons.push_back(T);
    report.mean_regret.push_back(summary.pseudo_regret.mean);
    report.mean_compensation.push_back(summary.compensation.mean);
    xs.push_back(static_cast<double>(T));
  }
  report.regret_fit = fit_loglog_slope(xs, report.mean_regret);
  report.compensation_fit = fit_loglog_slope(xs, report.mean_compensation);
  return report;
}

GapDiagnostic gap_diagnostic(const MeanSchedule& schedule, std::size_t sigma, double epsilon) {
  if (sigma < 1) throw std::invalid_argument("gap diagnostic: sigma must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("gap diagnostic: epsilon must lie in [0, 1]");
  }
  GapDiagnostic d;
  d.sigma = sigma;
  d.epsilon = epsilon;
  const std::size_t K = schedule.arms();
  const std::size_t T = schedule.horizon();
  bool have_min = false;
  for (const Batch& batch : partition_horizon(T, sigma)) {
    std::vector<double> gap(K, 0.0);
    for (std::size_t t = batch.first; t <= batch.last; ++t) {
      const double best = schedule.optimal_mean(t);
      for (std::size_t a = 0; a < K; ++a) gap[a] += best - schedule.row(t)[a];
    }
    for (double& g : gap) g /= static_cast<double>(sigma);
    const std::size_t batch_best =
        static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
    for (std::size_t a = 0; a < K; ++a) {
      if (a == batch_best) continue;
      if (!have_min || gap[a] < d.min_gap) d.min_gap = gap[a];
      have_min = true;
    }
    d.gaps.push_back(std::move(gap));
  }
  for (std::size_t t = 1; t <= T; ++t) {
    const double* mu = schedule.row(t);
    for (std::size_t a = 0; a < K; ++a) {
      for (std::size_t b = 0; b < K; ++b) {
        if (a != b && mu[a] - mu[b] <= epsilon) ++d.near_tie_count;
      }
    }
  }
  if (d.near_tie_count > 1 && T > 1) {
    d.alpha = std::log(static_cast<double>(d.near_tie_count)) / std::log(static_cast<double>(T));
  }
  return d;
}

}  // namespace driftbandit
