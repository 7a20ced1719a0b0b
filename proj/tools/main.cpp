// driftbandit command-line front end.
//
//   driftbandit run --config PATH [--set KEY=VALUE]... [--out DIR] [--workers N] [--seed U64]
//   driftbandit sweep --config PATH [--gamma-c LIST] [--tau-c LIST] ...
//   driftbandit scaling --horizons T1,T2,T3 [--family NAME]... [--config PATH] ...
//   driftbandit reproduce TARGET [--out DIR] [--workers N] [--seed U64] [--drift L]
//
// Exit codes: 0 success, 1 runtime failure, 2 validation failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "driftbandit/config.hpp"
#include "driftbandit/harness.hpp"
#include "driftbandit/output.hpp"
#include "driftbandit/reproduce.hpp"

namespace fs = std::filesystem;
using namespace driftbandit;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kValidationError = 2;

/// Validation failure already formatted for the user.
struct UsageError {
  std::string message;
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{path + ": cannot open config file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1-based line of the innermost component of a dotted key, 0 when absent.
std::size_t locate_key(std::string_view text, std::string_view key) {
  std::size_t pos = 0;
  std::size_t found = std::string_view::npos;
  while (!key.empty()) {
    const auto dot = key.find('.');
    const auto part = key.substr(0, dot);
    found = text.find("\"" + std::string(part) + "\"", pos);
    if (found == std::string_view::npos) return 0;
    pos = found + part.size() + 2;
    key = dot == std::string_view::npos ? std::string_view{} : key.substr(dot + 1);
  }
  if (found == std::string_view::npos) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + found, '\n')) + 1;
}

std::string anchor(const Common& c, const std::string& text, const ConfigError& e) {
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (o.substr(0, eq) == e.key() || o == e.key()) return "--set " + o + ": " + e.what();
  }
  const auto line = locate_key(text, e.key());
  if (line == 0) return c.config_path + ": " + e.what();
  return c.config_path + ":" + std::to_string(line) + ": " + e.what();
}

ExperimentConfig load(const Common& c) {
  const std::string text = read_file(c.config_path);
  auto overrides = c.overrides;
  if (c.seed) overrides.push_back("base_seed=" + std::to_string(*c.seed));
  try {
    return parse_config(text, overrides);
  } catch (const ConfigError& e) {
    throw UsageError{anchor(c, text, e)};
  }
}

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config_path, "Experiment config (JSON)");
  if (config_required) opt->required();
  app->add_option("--set", c.overrides, "Override KEY=VALUE (dotted path, repeatable)");
  app->add_option("--out", c.out_dir, "Output directory");
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Base seed");
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_curve(const fs::path& dir, const std::string& name, const std::vector<double>& mean,
                 const std::vector<double>& se) {
  auto out = open_out(dir / name);
  write_plot_csv(out, mean, se);
}

int cmd_run(const Common& c) {
  const auto config = load(c);
  const fs::path dir = c.out_dir;
  RunOptions options{c.workers, config.outputs.curves};
  const auto summary = run_experiment(config, options);
  {
    auto out = open_out(dir / config.outputs.summary);
    out << summary_json(summary);
  }
  if (config.outputs.trace) {
    auto out = open_out(dir / "trace.csv");
    const std::size_t reps = std::min(config.outputs.trace_reps, config.reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto rows = trace_replication(config, summary.scenario, rep);
      write_trace_csv(out, rows, rep == 0);
    }
  }
  if (summary.curves) {
    const auto& cv = *summary.curves;
    write_curve(dir, "curve_regret.csv", cv.pseudo_regret, cv.pseudo_regret_se);
    write_curve(dir, "curve_realized_regret.csv", cv.realized_regret, cv.realized_regret_se);
    write_curve(dir, "curve_compensation.csv", cv.compensation, cv.compensation_se);
    write_curve(dir, "curve_reward.csv", cv.reward, cv.reward_se);
    const std::vector<SvgSeries> series{{"regret", cv.pseudo_regret},
                                        {"compensation", cv.compensation}};
    auto out = open_out(dir / "curves.svg");
    out << render_svg(std::string(to_string(config.policy.params.kind)), "cumulative", series);
  }
  std::cout << "regret " << format_double(summary.pseudo_regret.mean) << " +/- "
            << format_double(summary.pseudo_regret.se) << "\ncompensation "
            << format_double(summary.compensation.mean) << " +/- "
            << format_double(summary.compensation.se) << '\n';
  return 0;
}

int cmd_sweep(const Common& c, std::vector<double> gamma_c, std::vector<double> tau_c) {
  const auto config = load(c);
  if (gamma_c.empty()) gamma_c = {10, 15, 20, 25, 30, 40};
  if (tau_c.empty()) tau_c = {0.9, 0.95, 1, 2};
  for (double g : gamma_c) {
    if (!(g > 0)) throw UsageError{"--gamma-c: values must be > 0"};
  }
  for (double t : tau_c) {
    if (!(t > 0)) throw UsageError{"--tau-c: values must be > 0"};
  }
  const auto result = sweep(config, {gamma_c, tau_c}, c.workers);
  auto out = open_out(fs::path(c.out_dir) / "sweep.csv");
  out << "gamma_c,tau_c,gamma,tau,regret,regret_stderr,compensation,compensation_stderr\n";
  for (const auto& row : result.table) {
    out << (row.gamma_c ? format_double(*row.gamma_c) : "") << ','
        << (row.tau_c ? format_double(*row.tau_c) : "") << ',' << format_double(row.gamma) << ','
        << row.tau << ',' << format_double(row.pseudo_regret.mean) << ','
        << format_double(row.pseudo_regret.se) << ',' << format_double(row.compensation.mean)
        << ',' << format_double(row.compensation.se) << '\n';
  }
  const auto& best = result.table[result.best];
  std::cout << "best";
  if (best.gamma_c) std::cout << " gamma_c=" << format_double(*best.gamma_c);
  if (best.tau_c) std::cout << " tau_c=" << format_double(*best.tau_c);
  std::cout << " regret=" << format_double(best.pseudo_regret.mean)
            << " compensation=" << format_double(best.compensation.mean) << '\n';
  return 0;
}

std::optional<ExperimentConfig> family_config(const std::string& family) {
  if (family == "abrupt-ducb") return abrupt_preset(1, PolicyKind::Ducb, 15, 1, 0.1);
  if (family == "abrupt-swucb") return abrupt_preset(1, PolicyKind::Swucb, 15, 1, 0.1);
  if (family == "continuous-ucb1") return budget_preset(3, PolicyKind::Ucb1, 0.1);
  return std::nullopt;
}

std::optional<double> synthetic_exponent(const std::string& family) {
  if (family == "synthetic-sqrt") return 0.5;
  if (family == "synthetic-two-thirds") return 2.0 / 3.0;
  return std::nullopt;
}

std::string fit_text(const SlopeFit& fit) {
  if (fit.degenerate) return "degenerate(" + fit.reason + ")";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << fit.slope;
  return ss.str();
}

int cmd_scaling(const Common& c, std::vector<std::size_t> horizons,
                std::vector<std::string> families, std::size_t reps) {
  if (horizons.size() < 3) throw UsageError{"--horizons: need at least 3 horizons"};
  for (auto T : horizons) {
    if (T < 2) throw UsageError{"--horizons: every horizon must be >= 2"};
  }
  if (families.empty() && c.config_path.empty()) {
    families = {"abrupt-ducb", "abrupt-swucb", "continuous-ucb1"};
  }
  std::vector<std::pair<std::string, ExperimentConfig>> runs;
  std::vector<std::pair<std::string, double>> synthetic;
  if (!c.config_path.empty()) runs.emplace_back("config", load(c));
  for (const auto& f : families) {
    if (auto e = synthetic_exponent(f)) {
      synthetic.emplace_back(f, *e);
    } else if (auto config = family_config(f)) {
      config->reps = reps;
      if (c.seed) config->base_seed = *c.seed;
      try {
        config->validate();
      } catch (const ConfigError& e) {
        throw UsageError{"--family " + f + ": " + e.what()};
      }
      runs.emplace_back(f, *config);
    } else {
      throw UsageError{"--family: unknown family '" + f + "'"};
    }
  }
  std::ostringstream report;
  std::vector<double> xs(horizons.begin(), horizons.end());
  for (const auto& [name, exponent] : synthetic) {
    std::vector<double> ys;
    for (double x : xs) ys.push_back(std::pow(x, exponent));
    report << name << " regret_slope=" << fit_text(fit_loglog_slope(xs, ys)) << '\n';
  }
  for (const auto& [name, config] : runs) {
    const auto r = scaling_probe(config, horizons, c.workers);
    report << name << " regret_slope=" << fit_text(r.regret_fit)
           << " compensation_slope=" << fit_text(r.compensation_fit) << " regret=";
    for (std::size_t i = 0; i < r.horizons.size(); ++i) {
      report << (i ? "," : "") << r.horizons[i] << ':' << format_double(r.mean_regret[i]);
    }
    report << '\n';
  }
  std::cout << report.str();
  auto out = open_out(fs::path(c.out_dir) / "scaling.txt");
  out << report.str();
  return 0;
}

int cmd_reproduce(const Common& c, const std::string& target, double drift) {
  if (!is_reproduce_target(target)) {
    std::string known;
    for (auto t : reproduce_targets()) known += (known.empty() ? "" : ", ") + std::string(t);
    throw UsageError{"reproduce: unknown target '" + target + "' (known: " + known + ")"};
  }
  if (!(drift >= 0.0)) throw UsageError{"--drift: must be >= 0"};
  ReproduceOptions options{c.out_dir, c.workers, c.seed.value_or(1), drift};
  const auto report = reproduce(target, options);
  if (!report.rows.empty()) {
    std::cout << std::left << std::setw(10) << "column" << std::setw(8) << "metric"
              << std::right << std::setw(10) << "reference" << std::setw(10) << "produced"
              << std::setw(9) << "stderr" << std::setw(9) << "rel_dev" << '\n';
    for (const auto& r : report.rows) {
      std::cout << std::left << std::setw(10) << r.column << std::setw(8) << r.metric
                << std::right << std::fixed << std::setprecision(1) << std::setw(10)
                << r.reference << std::setw(10) << r.produced << std::setprecision(2)
                << std::setw(9) << r.se << std::setw(8) << std::showpos
                << 100.0 * r.relative_deviation() << std::noshowpos << "%\n";
    }
  }
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incentivized exploration under reward drift: simulation and reproduction"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, scaling_opts, reproduce_opts;

  auto* run = app.add_subcommand("run", "Run one experiment and write summary.json");
  add_common(run, run_opts, true);

  auto* sw = app.add_subcommand("sweep", "Tune gamma_c (DUCB) or tau_c (SWUCB) over a grid");
  add_common(sw, sweep_opts, true);
  std::vector<double> gamma_grid, tau_grid;
  sw->add_option("--gamma-c", gamma_grid, "gamma_c grid")->delimiter(',');
  sw->add_option("--tau-c", tau_grid, "tau_c grid")->delimiter(',');

  auto* sc = app.add_subcommand("scaling", "Fit log-log regret slopes over horizons");
  add_common(sc, scaling_opts, false);
  std::vector<std::size_t> horizons;
  std::vector<std::string> families;
  std::size_t scaling_reps = 200;
  sc->add_option("--horizons", horizons, "Horizons, at least 3")->delimiter(',')->required();
  sc->add_option("--family", families,
                 "abrupt-ducb, abrupt-swucb, continuous-ucb1, synthetic-sqrt, "
                 "synthetic-two-thirds (repeatable)");
  sc->add_option("--reps", scaling_reps, "Replications per horizon for preset families")
      ->check(CLI::PositiveNumber);

  auto* rp = app.add_subcommand("reproduce", "Regenerate a table or figure");
  std::string target;
  double drift = 0.1;
  rp->add_option("target", target, "table2, table3, fig2, fig3, fig4 or fig5")->required();
  rp->add_option("--out", reproduce_opts.out_dir, "Output directory");
  rp->add_option("--workers", reproduce_opts.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  rp->add_option("--seed", reproduce_opts.seed, "Base seed");
  rp->add_option("--drift", drift, "Linear drift constant l");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sw) return cmd_sweep(sweep_opts, gamma_grid, tau_grid);
    if (*sc) return cmd_scaling(scaling_opts, horizons, families, scaling_reps);
    return cmd_reproduce(reproduce_opts, target, drift);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kValidationError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
