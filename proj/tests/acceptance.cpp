#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftbandit/harness.hpp"
#include "driftbandit/output.hpp"
#include "driftbandit/reproduce.hpp"

using namespace driftbandit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;
std::FILE* report_file = nullptr;

// printf to stdout and, when --report is given, to the report file.
[[gnu::format(printf, 1, 2)]] void out(const char* f, ...) {
  std::va_list args;
  va_start(args, f);
  if (report_file) {
    std::va_list copy;
    va_copy(copy, args);
    std::vfprintf(report_file, f, copy);
    va_end(copy);
    std::fflush(report_file);
  }
  std::vprintf(f, args);
  va_end(args);
  std::fflush(stdout);
}

void report(int id, const char* name, const Verdict& v, double secs) {
  if (!v.pass) ++failures;
  out("criterion %2d %-34s %s  (%.1fs) %s\n", id, name, v.pass ? "PASS" : "FAIL", secs,
      v.detail.c_str());
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig with_reps(ExperimentConfig c, std::size_t reps) {
  c.reps = reps;
  return c;
}

// --- 1 -----------------------------------------------------------------------

Verdict table2_ordering() {
  Verdict v;
  out("  beta  R_U       R_S       R_D\n");
  for (const auto& ref : kAbruptReference) {
    const double u =
        run_experiment(abrupt_preset(ref.beta_T, PolicyKind::Ucb1, ref.gamma_c, ref.tau_c, 0.1))
            .pseudo_regret.mean;
    const double s =
        run_experiment(abrupt_preset(ref.beta_T, PolicyKind::Swucb, ref.gamma_c, ref.tau_c, 0.1))
            .pseudo_regret.mean;
    const double d =
        run_experiment(abrupt_preset(ref.beta_T, PolicyKind::Ducb, ref.gamma_c, ref.tau_c, 0.1))
            .pseudo_regret.mean;
    out("  %-4zu  %-8.1f  %-8.1f  %-8.1f\n", ref.beta_T, u, s, d);
    if (!(s < u && d < u)) {
      v.pass = false;
      v.detail += "beta=" + std::to_string(ref.beta_T) + " ";
    }
  }
  if (!v.pass) v.detail = "UCB1 not beaten at " + v.detail;
  return v;
}

// --- 2, 3 --------------------------------------------------------------------

struct Envelope {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double x) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
};

bool check_envelope(const char* metric, double reference, const Envelope& e, double tol,
                    std::string& missed) {
  const double lo = e.lo * (1.0 - tol);
  const double hi = e.hi * (1.0 + tol);
  const bool ok = reference >= lo && reference <= hi;
  out("  %-5s ref %-7.1f envelope [%.1f, %.1f] band [%.1f, %.1f] %s\n", metric, reference,
      e.lo, e.hi, lo, hi, ok ? "inside" : "outside");
  if (!ok) missed += std::string(metric) + " ";
  return ok;
}

struct TrioConfig {
  const char* regret;
  const char* comp;
  double ref_regret;
  double ref_comp;
  std::function<ExperimentConfig(double)> make;
};

Verdict envelope_check(std::span<const TrioConfig> trio, double tol_r, double tol_c) {
  std::vector<Envelope> regret(trio.size()), comp(trio.size());
  out("  l      ");
  for (const auto& p : trio) out("%-16s%-10s", p.regret, p.comp);
  out("\n");
  for (double l : kDriftGrid) {
    out("  %-5.2f  ", l);
    for (std::size_t i = 0; i < trio.size(); ++i) {
      const auto s = run_experiment(trio[i].make(l));
      regret[i].add(s.pseudo_regret.mean);
      regret[i].add(s.realized_regret.mean);
      comp[i].add(s.compensation.mean);
      out("%-7.1f/%-7.1f %-10.1f", s.pseudo_regret.mean, s.realized_regret.mean,
          s.compensation.mean);
    }
    out("\n");
  }
  Verdict v;
  std::string missed;
  for (std::size_t i = 0; i < trio.size(); ++i) {
    v.pass &= check_envelope(trio[i].regret, trio[i].ref_regret, regret[i], tol_r, missed);
    v.pass &= check_envelope(trio[i].comp, trio[i].ref_comp, comp[i], tol_c, missed);
  }
  if (!v.pass) v.detail = "outside band: " + missed;
  return v;
}

Verdict table2_quantitative() {
  const auto& ref = kAbruptReference[0];
  const auto make = [&](PolicyKind kind) {
    return [&ref, kind](double l) {
      return abrupt_preset(ref.beta_T, kind, ref.gamma_c, ref.tau_c, l);
    };
  };
  const std::vector<TrioConfig> trio{
      {"R_U", "C_U", ref.R_U, ref.C_U, make(PolicyKind::Ucb1)},
      {"R_S", "C_S", ref.R_S, ref.C_S, make(PolicyKind::Swucb)},
      {"R_D", "C_D", ref.R_D, ref.C_D, make(PolicyKind::Ducb)},
  };
  return envelope_check(trio, 0.25, 0.35);
}

Verdict table3() {
  const auto& ref = kBudgetReference[0];
  const auto make = [](PolicyKind kind) {
    return [kind](double l) { return budget_preset(3, kind, l); };
  };
  const std::vector<TrioConfig> trio{
      {"R_U", "C_U", ref.R_U, ref.C_U, make(PolicyKind::Ucb1)},
      {"R_EG", "C_EG", ref.R_EG, ref.C_EG, make(PolicyKind::EpsGreedy)},
      {"R_T", "C_T", ref.R_T, ref.C_T, make(PolicyKind::Thompson)},
  };
  Verdict v = envelope_check(trio, 0.15, 0.30);

  const PolicyKind kinds[] = {PolicyKind::Ucb1, PolicyKind::EpsGreedy, PolicyKind::Thompson};
  const char* names[] = {"R_U", "C_U", "R_EG", "C_EG", "R_T", "C_T"};
  std::vector<std::vector<double>> series(6);
  out("  V     R_U     C_U     R_EG    C_EG    R_T     C_T\n");
  for (const auto& col : kBudgetReference) {
    out("  %-4.0f", col.budget);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto s = run_experiment(budget_preset(col.budget, kinds[i], 0.1));
      series[2 * i].push_back(s.pseudo_regret.mean);
      series[2 * i + 1].push_back(s.compensation.mean);
    }
    for (const auto& m : series) out("  %-6.1f", m.back());
    out("\n");
  }
  std::string flat;
  for (std::size_t m = 0; m < series.size(); ++m) {
    for (std::size_t j = 1; j < series[m].size(); ++j) {
      if (!(series[m][j] > series[m][j - 1])) {
        flat += std::string(names[m]) + " ";
        break;
      }
    }
  }
  if (!flat.empty()) {
    v.pass = false;
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("not increasing in V: ") + flat;
  }
  return v;
}

// --- 4 -----------------------------------------------------------------------

Verdict scaling() {
  const std::vector<std::size_t> horizons{2000, 8000, 32000};
  struct Probe {
    const char* name;
    ExperimentConfig config;
    double lo, hi;
  };
  const Probe probes[] = {
      {"DUCB", with_reps(abrupt_preset(1, PolicyKind::Ducb, 15, 1, 0.1), 200), 0.3, 0.8},
      {"SWUCB", with_reps(abrupt_preset(1, PolicyKind::Swucb, 15, 1, 0.1), 200), 0.3, 0.8},
      {"restart+UCB1", with_reps(budget_preset(3, PolicyKind::Ucb1, 0.1), 200), 0.45, 0.85},
  };
  Verdict v;
  for (const auto& p : probes) {
    const auto r = scaling_probe(p.config, horizons);
    const double slope = r.regret_fit.slope;
    const bool ok = !r.regret_fit.degenerate && slope >= p.lo && slope <= p.hi;
    out("  %-13s regret %.1f %.1f %.1f slope %.4f in [%.2f, %.2f]\n", p.name,
        r.mean_regret[0], r.mean_regret[1], r.mean_regret[2], slope, p.lo, p.hi);
    v.detail += std::string(p.name) + "=" + fmt("%.3f", slope) + " ";
    v.pass &= ok;
  }
  return v;
}

// --- 5 -----------------------------------------------------------------------

Verdict discount_mass() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> length(1, 400), arms(2, 6);
  std::size_t checked = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int seq = 0; seq < 10000; ++seq) {
    PolicyParams p;
    p.kind = PolicyKind::Ducb;
    // Mix uniform draws with draws concentrated near 1, where 1/(1-gamma) is large.
    p.gamma = seq % 2 == 0 ? unit(gen) : 1.0 - std::pow(10.0, -6.0 * unit(gen));
    if (p.gamma <= 0.0) p.gamma = 1e-12;
    if (p.gamma >= 1.0) p.gamma = std::nextafter(1.0, 0.0);
    const std::size_t K = arms(gen);
    Policy policy(p, K);
    Rng rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, K - 1);
    const std::size_t n = length(gen);
    for (std::size_t t = 1; t <= n; ++t) {
      policy.observe(pick(gen), unit(gen), rng);
      const double total = std::get<DucbState>(policy.state()).disc_total;
      const double bound = std::min(static_cast<double>(t), 1.0 / (1.0 - p.gamma));
      worst = std::max(worst, total - bound);
      ++checked;
      if (total > bound + 1e-9) {
        return {false, "sequence " + std::to_string(seq) + " step " + std::to_string(t) +
                           " exceeds by " + fmt("%.3g", total - bound)};
      }
    }
  }
  return {true, std::to_string(checked) + " steps, max excess " + fmt("%.3g", worst)};
}

// --- 6 -----------------------------------------------------------------------

Verdict drift_bounds() {
  Verdict v;
  std::size_t compensated = 0, runs = 0;
  for (PolicyKind kind : {PolicyKind::Ducb, PolicyKind::Swucb}) {
    for (std::size_t beta : {1, 3, 7}) {
      for (double l : {0.1, 0.5, 1.0}) {
        for (std::size_t rep = 0; rep < 4; ++rep) {
          auto c = abrupt_preset(beta, kind, 15, 1, l);
          const auto scenario = build_scenario(c);
          const MeanSchedule& schedule = scenario.schedule;
          const std::size_t K = schedule.arms();
          Policy policy(scenario.policy, K);
          Rng rng(replication_seed(c.base_seed, rep));
          std::vector<double> radius(K), D(K, 0.0);
          ++runs;
          for (std::size_t t = 1; t <= c.T; ++t) {
            for (std::size_t a = 0; a < K; ++a) radius[a] = policy.confidence_radius(a);
            const auto out = incentive_step(policy, schedule, t, c.incentive, rng);
            if (out.compensation > 0.0) {
              ++compensated;
              const double ca = radius[out.recommended], cg = radius[out.greedy];
              const bool ok = std::isinf(ca) || out.drift <= l * (ca - cg) + 1e-12;
              if (!ok) {
                return {false, std::string(to_string(kind)) + " step " + std::to_string(t) +
                                   ": drift " + fmt("%.6g", out.drift) + " > " +
                                   fmt("%.6g", l * (ca - cg))};
              }
            }
            D[out.recommended] += out.drift;
            double log_term;
            if (kind == PolicyKind::Ducb) {
              log_term = std::log(std::get<DucbState>(policy.state()).disc_total);
            } else {
              log_term = std::log(static_cast<double>(std::min(t, scenario.policy.tau)));
            }
            const double factor = kind == PolicyKind::Ducb ? 2.0 : 1.0;
            for (std::size_t a = 0; a < K; ++a) {
              const double bound = factor * l * static_cast<double>(policy.pulls(a)) *
                                   std::sqrt(scenario.policy.xi * std::max(log_term, 0.0));
              if (D[a] > bound + 1e-12) {
                return {false, std::string(to_string(kind)) + " step " + std::to_string(t) +
                                   ": D = " + fmt("%.6g", D[a]) + " > " + fmt("%.6g", bound)};
              }
            }
          }
        }
      }
    }
  }
  v.detail = std::to_string(runs) + " runs, " + std::to_string(compensated) + " compensated steps";
  return v;
}

// --- 7 -----------------------------------------------------------------------

std::vector<std::size_t> arm_sequence(const PolicyParams& params, const MeanSchedule& schedule,
                                      const DriftModel& model, std::uint64_t seed) {
  Policy policy(params, schedule.arms());
  Rng rng(seed);
  std::vector<std::size_t> arms;
  arms.reserve(schedule.horizon());
  for (std::size_t t = 1; t <= schedule.horizon(); ++t) {
    arms.push_back(incentive_step(policy, schedule, t, model, rng).recommended);
  }
  return arms;
}

Verdict equivalence() {
  constexpr std::size_t T = 5000;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> arms(2, 5);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t K = arms(gen);
    std::vector<double> mu(K);
    for (auto& m : mu) m = unit(gen);
    std::vector<double> means;
    means.reserve(T * K);
    for (std::size_t t = 0; t < T; ++t) means.insert(means.end(), mu.begin(), mu.end());
    const MeanSchedule schedule(K, T, std::move(means));
    const DriftModel model{DriftKind::Linear, unit(gen), 1.0};
    const std::uint64_t seed = gen();

    PolicyParams ucb;
    ucb.kind = PolicyKind::Ucb1;
    PolicyParams ducb;
    ducb.kind = PolicyKind::Ducb;
    ducb.gamma = 1.0;
    ducb.xi = 0.5;
    PolicyParams swucb;
    swucb.kind = PolicyKind::Swucb;
    swucb.tau = T + inst;
    swucb.xi = 2.0;

    const auto base = arm_sequence(ucb, schedule, model, seed);
    if (arm_sequence(ducb, schedule, model, seed) != base) {
      return {false, "DUCB differs on instance " + std::to_string(inst)};
    }
    if (arm_sequence(swucb, schedule, model, seed) != base) {
      return {false, "SWUCB differs on instance " + std::to_string(inst)};
    }
  }
  return {true, "100 instances x 5000 steps"};
}

// --- 8 -----------------------------------------------------------------------

Verdict incremental_statistics() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t T = 5000;
  constexpr int kRuns = 10;
  double worst = 0.0;
  std::size_t checkpoints = 0;
  for (int run = 0; run < kRuns; ++run) {
    const std::size_t K = 2 + run % 3;
    PolicyParams dp;
    dp.kind = PolicyKind::Ducb;
    dp.gamma = 1.0 - std::pow(10.0, -3.0 * unit(gen));
    PolicyParams sp;
    sp.kind = PolicyKind::Swucb;
    sp.tau = 1 + static_cast<std::size_t>(unit(gen) * 800);
    Policy ducb(dp, K), swucb(sp, K);
    Rng rng(run);
    std::uniform_int_distribution<std::size_t> pick(0, K - 1);
    std::vector<std::size_t> hist_arm;
    std::vector<double> hist_reward;

    std::vector<std::size_t> stops(100);
    std::uniform_int_distribution<std::size_t> when(1, T);
    for (auto& s : stops) s = when(gen);
    std::sort(stops.begin(), stops.end());
    std::size_t next = 0;

    for (std::size_t t = 1; t <= T; ++t) {
      const std::size_t a = pick(gen);
      const double r = unit(gen) < 0.5 ? unit(gen) : std::round(unit(gen));
      ducb.observe(a, r, rng);
      swucb.observe(a, r, rng);
      hist_arm.push_back(a);
      hist_reward.push_back(r);
      while (next < stops.size() && stops[next] == t) {
        ++next;
        ++checkpoints;
        const auto& ds = std::get<DucbState>(ducb.state());
        long double total = 0.0L;
        std::vector<long double> count(K, 0.0L), sum(K, 0.0L);
        for (std::size_t s = 1; s <= t; ++s) {
          const long double w = std::pow(static_cast<long double>(dp.gamma),
                                         static_cast<long double>(t - s));
          total += w;
          count[hist_arm[s - 1]] += w;
          sum[hist_arm[s - 1]] += w * hist_reward[s - 1];
        }
        worst = std::max(worst, static_cast<double>(std::fabs(ds.disc_total - total)));
        for (std::size_t k = 0; k < K; ++k) {
          worst = std::max(worst, static_cast<double>(std::fabs(ds.disc_count[k] - count[k])));
          worst = std::max(worst, static_cast<double>(std::fabs(ds.disc_sum[k] - sum[k])));
        }
        if (worst >= 1e-9) {
          return {false, "DUCB deviation " + fmt("%.3g", worst) + " at t=" + std::to_string(t)};
        }

        const auto& ss = std::get<SwucbState>(swucb.state());
        std::vector<std::uint64_t> wc(K, 0);
        std::vector<long double> ws(K, 0.0L);
        const std::size_t first = t > sp.tau ? t - sp.tau + 1 : 1;
        for (std::size_t s = first; s <= t; ++s) {
          ++wc[hist_arm[s - 1]];
          ws[hist_arm[s - 1]] += hist_reward[s - 1];
        }
        for (std::size_t k = 0; k < K; ++k) {
          if (ss.win_count[k] != wc[k]) {
            return {false, "SWUCB count mismatch at t=" + std::to_string(t)};
          }
          if (std::fabs(ss.win_sum[k] - ws[k]) >= 1e-9) {
            return {false, "SWUCB sum mismatch at t=" + std::to_string(t)};
          }
        }
      }
    }
  }
  return {true, std::to_string(checkpoints) + " checkpoints, max DUCB deviation " +
                    fmt("%.3g", worst)};
}

// --- 9 -----------------------------------------------------------------------

Verdict environment_budget() {
  std::size_t generated = 0, rejected = 0;
  double max_ratio = 0.0;
  for (std::size_t T : {50, 500, 5000, 20000}) {
    for (double V : {0.1, 0.5, 1.0, 3.0, 6.0, 12.0, 24.0}) {
      for (double A : {0.05, 0.1, 0.3, 0.45, 0.5}) {
        for (double rho : {0.1, 1.0 / 3.0, 0.5, 1.0}) {
          try {
            const auto env = make_sinusoidal_env(T, V, A, rho);
            ++generated;
            const double var = variation_of(env.schedule);
            max_ratio = std::max(max_ratio, var / V);
            if (!(var <= V)) {
              return {false, "variation " + fmt("%.17g", var) + " exceeds V=" + fmt("%g", V)};
            }
          } catch (const std::invalid_argument&) {
            ++rejected;
          }
        }
      }
    }
  }
  std::size_t flips = 0;
  for (std::size_t T : {10, 1000, 5000}) {
    for (std::size_t p = 1; p <= 10 && p <= T; ++p) {
      for (auto [hi, lo] : {std::pair{0.99, 0.01}, {0.9, 0.1}, {0.7, 0.2}, {0.55, 0.45}}) {
        const auto env = make_flip_env(T, p, hi, lo);
        ++flips;
        const double expected = static_cast<double>(env.beta_T()) * (hi - lo);
        if (env.beta_T() != p - 1 || variation_of(env.schedule) != expected) {
          return {false, "flip T=" + std::to_string(T) + " p=" + std::to_string(p) +
                             " variation " + fmt("%.17g", variation_of(env.schedule))};
        }
      }
    }
  }
  return {true, std::to_string(generated) + " sinusoidal (" + std::to_string(rejected) +
                    " rejected at construction, max V ratio " + fmt("%.4f", max_ratio) + "), " +
                    std::to_string(flips) + " flip"};
}

// --- 10 ----------------------------------------------------------------------

Verdict determinism() {
  std::vector<ExperimentConfig> configs{
      with_reps(abrupt_preset(3, PolicyKind::Ducb, 15, 1, 0.5), 37),
      with_reps(abrupt_preset(2, PolicyKind::Swucb, 10, 0.95, 0.1), 21),
      with_reps(budget_preset(3, PolicyKind::Thompson, 0.1), 40),
      with_reps(budget_preset(12, PolicyKind::EpsGreedy, 1.0, 1.0 / 3.0), 17),
      with_reps(abrupt_preset(1, PolicyKind::Ucb1, 15, 1, 0.0), 16),
  };
  configs[4].base_seed = 0xFFFFFFFFFFFFFFFFull;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string first = summary_json(run_experiment(configs[i]));
    for (std::size_t workers : {1, 2, 3, 8}) {
      if (summary_json(run_experiment(configs[i], {workers, false})) != first) {
        return {false, "config " + std::to_string(i) + " differs at " + std::to_string(workers) +
                           " workers"};
      }
    }
  }
  return {true, std::to_string(configs.size()) + " configs x 5 runs, workers 1/2/3/8"};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
      report_file = std::fopen(argv[++i], "w");
      if (!report_file) {
        std::fprintf(stderr, "acceptance: cannot open %s\n", argv[i]);
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: acceptance [--strict] [--report PATH]\n");
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    Verdict (*body)();
    double budget_s;  // 0: no runtime bound
  };
  const Criterion criteria[] = {
      {1, "abrupt ordering (beta 1..7)", table2_ordering, 120},
      {2, "abrupt beta=1 values", table2_quantitative, 0},
      {3, "budget V=3 values and V trend", table3, 600},
      {4, "regret scaling slopes", scaling, 900},
      {5, "discounted mass bound", discount_mass, 0},
      {6, "drift bounds", drift_bounds, 0},
      {7, "UCB1 equivalence", equivalence, 0},
      {8, "incremental statistics", incremental_statistics, 0},
      {9, "environment budget", environment_budget, 0},
      {10, "determinism", determinism, 0},
  };

  const auto total = Clock::now();
  for (const auto& c : criteria) {
    out("-- criterion %d: %s\n", c.id, c.name);
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(start);
    if (c.budget_s > 0 && secs >= c.budget_s) {
      v.pass = false;
      v.detail += " runtime over " + fmt("%.0fs", c.budget_s);
    }
    report(c.id, c.name, v, secs);
  }
  out("%d of 10 criteria failed, %.1fs total\n", failures, seconds_since(total));
  if (report_file) std::fclose(report_file);
  return strict && failures > 0 ? 1 : 0;
}
