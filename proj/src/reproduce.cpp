#include "driftbandit/reproduce.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "driftbandit/harness.hpp"
#include "driftbandit/output.hpp"

namespace driftbandit {
namespace {

constexpr std::array<std::string_view, 6> kTargets{"table2", "table3", "fig2", "fig3", "fig4",
                                                   "fig5"};

std::string label(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Ucb1: return "ucb1";
    case PolicyKind::Ducb: return "ducb";
    case PolicyKind::Swucb: return "swucb";
    case PolicyKind::EpsGreedy: return "epsgreedy";
    case PolicyKind::Thompson: return "thompson";
  }
  return "policy";
}

std::string number(double x) { return format_double(x); }

class Writer {
 public:
  Writer(std::filesystem::path dir, ReproduceReport& report)
      : dir_(std::move(dir)), report_(report) {
    std::filesystem::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    report_.files.push_back(path);
    return out;
  }

  void plot(const std::string& name, const std::vector<double>& mean,
            const std::vector<double>& se) {
    auto out = open(name);
    write_plot_csv(out, mean, se);
  }

  void svg(const std::string& name, std::string_view title, std::string_view y_label,
           const std::vector<SvgSeries>& series) {
    auto out = open(name);
    out << render_svg(title, y_label, series);
  }

 private:
  std::filesystem::path dir_;
  ReproduceReport& report_;
};

AggregateSummary run(ExperimentConfig config, const ReproduceOptions& options, bool curves) {
  config.base_seed = options.base_seed;
  return run_experiment(config, {options.workers, curves});
}

void add_row(ReproduceReport& report, const std::string& column, const std::string& metric,
             double reference, const AggregateSummary& s, bool regret) {
  ComparisonRow row{column, metric, reference, 0.0, 0.0, 0.0};
  if (regret) {
    row.produced = s.pseudo_regret.mean;
    row.se = s.pseudo_regret.se;
    row.realized = s.realized_regret.mean;
  } else {
    row.produced = s.compensation.mean;
    row.se = s.compensation.se;
    row.realized = s.compensation.mean;
  }
  report.rows.push_back(std::move(row));
}

void table2(const ReproduceOptions& options, ReproduceReport& report, Writer& w) {
  for (const auto& ref : kAbruptReference) {
    const std::string column = "beta_T=" + std::to_string(ref.beta_T);
    const auto u = run(abrupt_preset(ref.beta_T, PolicyKind::Ucb1, ref.gamma_c, ref.tau_c,
                                     options.drift),
                       options, false);
    const auto s = run(abrupt_preset(ref.beta_T, PolicyKind::Swucb, ref.gamma_c, ref.tau_c,
                                     options.drift),
                       options, false);
    const auto d = run(abrupt_preset(ref.beta_T, PolicyKind::Ducb, ref.gamma_c, ref.tau_c,
                                     options.drift),
                       options, false);
    add_row(report, column, "R_U", ref.R_U, u, true);
    add_row(report, column, "R_S", ref.R_S, s, true);
    add_row(report, column, "R_D", ref.R_D, d, true);
    add_row(report, column, "C_U", ref.C_U, u, false);
    add_row(report, column, "C_S", ref.C_S, s, false);
    add_row(report, column, "C_D", ref.C_D, d, false);
  }
  auto out = w.open("table2.csv");
  write_comparison_csv(out, report.rows);
}

void table3(const ReproduceOptions& options, ReproduceReport& report, Writer& w) {
  for (const auto& ref : kBudgetReference) {
    const std::string column = "V_T=" + number(ref.budget);
    const auto u = run(budget_preset(ref.budget, PolicyKind::Ucb1, options.drift), options, false);
    const auto e =
        run(budget_preset(ref.budget, PolicyKind::EpsGreedy, options.drift), options, false);
    const auto t =
        run(budget_preset(ref.budget, PolicyKind::Thompson, options.drift), options, false);
    add_row(report, column, "R_U", ref.R_U, u, true);
    add_row(report, column, "C_U", ref.C_U, u, false);
    add_row(report, column, "R_EG", ref.R_EG, e, true);
    add_row(report, column, "C_EG", ref.C_EG, e, false);
    add_row(report, column, "R_T", ref.R_T, t, true);
    add_row(report, column, "C_T", ref.C_T, t, false);
  }
  auto out = w.open("table3.csv");
  write_comparison_csv(out, report.rows);
}

// Regret and compensation curves of a set of policies on one scenario family.
void curve_figure(const std::string& name, const std::vector<ExperimentConfig>& configs,
                  const ReproduceOptions& options, Writer& w) {
  std::vector<SvgSeries> regret;
  std::vector<SvgSeries> comp;
  for (const auto& config : configs) {
    const auto s = run(config, options, true);
    const auto& c = *s.curves;
    const auto policy = label(config.policy.params.kind);
    w.plot(name + "_" + policy + "_regret.csv", c.pseudo_regret, c.pseudo_regret_se);
    w.plot(name + "_" + policy + "_compensation.csv", c.compensation, c.compensation_se);
    regret.push_back({policy, c.pseudo_regret});
    comp.push_back({policy, c.compensation});
  }
  w.svg(name + "_regret.svg", name + " regret", "cumulative regret", regret);
  w.svg(name + "_compensation.svg", name + " compensation", "cumulative compensation", comp);
}

std::vector<ExperimentConfig> abrupt_trio(std::size_t beta_T, double gamma_c, double tau_c,
                                          double drift) {
  return {abrupt_preset(beta_T, PolicyKind::Ducb, gamma_c, tau_c, drift),
          abrupt_preset(beta_T, PolicyKind::Swucb, gamma_c, tau_c, drift),
          abrupt_preset(beta_T, PolicyKind::Ucb1, gamma_c, tau_c, drift)};
}

std::vector<ExperimentConfig> restart_trio(double active_fraction, double drift) {
  return {budget_preset(3, PolicyKind::Ucb1, drift, active_fraction),
          budget_preset(3, PolicyKind::EpsGreedy, drift, active_fraction),
          budget_preset(3, PolicyKind::Thompson, drift, active_fraction)};
}

void fig4(const ReproduceOptions& options, Writer& w) {
  const std::pair<std::string, double> instances[] = {{"full", 1.0}, {"third", 1.0 / 3.0}};
  for (const auto& [tag, rho] : instances) {
    const auto configs = restart_trio(rho, options.drift);
    const auto scenario = build_scenario(configs.front());
    {
      auto out = w.open("fig4_" + tag + "_means.csv");
      write_schedule_csv(out, scenario.schedule);
    }
    std::vector<SvgSeries> reward;
    for (const auto& config : configs) {
      const auto s = run(config, options, true);
      const auto policy = label(config.policy.params.kind);
      w.plot("fig4_" + tag + "_" + policy + "_reward.csv", s.curves->reward, s.curves->reward_se);
      reward.push_back({policy, s.curves->reward});
    }
    w.svg("fig4_" + tag + "_reward.svg", "fig4 " + tag + " total reward", "cumulative reward",
          reward);
  }
}

}  // namespace

ExperimentConfig abrupt_preset(std::size_t beta_T, PolicyKind kind, double gamma_c, double tau_c,
                               double drift) {
  ExperimentConfig c;
  c.T = 5000;
  c.K = 2;
  c.reps = 100;
  c.env.kind = EnvKind::Flip;
  c.env.segments = beta_T + 1;
  c.env.hi = 0.99;
  c.env.lo = 0.01;
  c.policy.params.kind = kind;
  if (kind == PolicyKind::Ducb) c.policy.gamma_c = gamma_c;
  if (kind == PolicyKind::Swucb) c.policy.tau_c = tau_c;
  c.incentive = {DriftKind::Linear, drift, 1.0};
  return c;
}

ExperimentConfig budget_preset(double budget, PolicyKind kind, double drift,
                               double active_fraction) {
  ExperimentConfig c;
  c.T = 5000;
  c.K = 2;
  c.reps = 2000;
  c.env.kind = EnvKind::Sinusoidal;
  c.env.budget = budget;
  c.env.amplitude = 0.3;
  c.env.active_fraction = active_fraction;
  c.policy.params.kind = kind;
  c.policy.params.eps_c = 2.0;
  c.incentive = {DriftKind::Linear, drift, 1.0};
  c.restart = RestartSpec{std::nullopt, 1.0};
  return c;
}

std::span<const std::string_view> reproduce_targets() noexcept { return kTargets; }

bool is_reproduce_target(std::string_view target) noexcept {
  return std::find(kTargets.begin(), kTargets.end(), target) != kTargets.end();
}

ReproduceReport reproduce(std::string_view target, const ReproduceOptions& options) {
  if (!is_reproduce_target(target)) {
    throw std::invalid_argument("unknown reproduce target '" + std::string(target) + "'");
  }
  ReproduceReport report;
  report.target = std::string(target);
  Writer w(options.out_dir / report.target, report);
  if (target == "table2") {
    table2(options, report, w);
  } else if (target == "table3") {
    table3(options, report, w);
  } else if (target == "fig2") {
    curve_figure("fig2", abrupt_trio(1, 15, 1, options.drift), options, w);
  } else if (target == "fig3") {
    curve_figure("fig3", abrupt_trio(7, 40, 1, options.drift), options, w);
  } else if (target == "fig4") {
    fig4(options, w);
  } else {
    curve_figure("fig5", restart_trio(1.0, options.drift), options, w);
  }
  return report;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "column,metric,reference,produced,stderr,realized,rel_dev\n";
  for (const auto& r : rows) {
    out << r.column << ',' << r.metric << ',' << format_double(r.reference) << ','
        << format_double(r.produced) << ',' << format_double(r.se) << ','
        << format_double(r.realized) << ',' << format_double(r.relative_deviation()) << '\n';
  }
}

}  // namespace driftbandit
