#include "driftbandit/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace driftbandit {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

nlohmann::ordered_json metric_json(const Metric& m) {
  nlohmann::ordered_json j;
  j["mean"] = m.mean;
  j["stderr"] = m.se;
  return j;
}

}  // namespace

std::string summary_json(const AggregateSummary& s) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(serialize_config(s.config));
  nlohmann::ordered_json resolved;
  resolved["policy"] = std::string(to_string(s.scenario.policy.kind));
  resolved["gamma"] = s.scenario.policy.gamma;
  resolved["tau"] = s.scenario.policy.tau;
  resolved["xi"] = s.scenario.policy.xi;
  resolved["sigma"] = s.scenario.sigma;
  resolved["batches"] = (s.config.T + s.scenario.sigma - 1) / s.scenario.sigma;
  resolved["beta_T"] = s.scenario.breakpoints.size();
  resolved["breakpoints"] = s.scenario.breakpoints;
  resolved["variation_budget"] = s.scenario.budget;
  resolved["measured_variation"] = variation_of(s.scenario.schedule);
  resolved["base_seed"] = s.config.base_seed;
  resolved["seed_derivation"] = "splitmix64(base_seed ^ splitmix64(rep + 0x9E3779B97F4A7C15))";
  resolved["seeds"] = s.seeds;
  j["resolved"] = resolved;
  j["reps"] = s.reps;
  j["pseudo_regret"] = metric_json(s.pseudo_regret);
  j["realized_regret"] = metric_json(s.realized_regret);
  j["compensation"] = metric_json(s.compensation);
  j["total_reward"] = metric_json(s.total_reward);
  return j.dump(2) + "\n";
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows, bool header) {
  if (header) out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.step;
    out << r.rep << ',' << s.t << ',' << s.batch << ',' << s.recommended + 1 << ',' << s.greedy + 1
        << ',' << format_double(s.compensation) << ',' << format_double(s.drift) << ','
        << format_double(s.true_reward) << ',' << format_double(s.observed_reward) << ','
        << format_double(r.cum_pseudo_regret) << ',' << format_double(r.cum_realized_regret) << ','
        << format_double(r.cum_comp) << '\n';
  }
}

void write_plot_csv(std::ostream& out, std::span<const double> mean, std::span<const double> se,
                    std::size_t stride) {
  out << kPlotHeader << '\n';
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if ((i + 1) % stride != 0 && i + 1 != mean.size()) continue;
    out << i + 1 << ',' << format_double(mean[i]) << ','
        << format_double(i < se.size() ? se[i] : 0.0) << '\n';
  }
}

std::string render_svg(std::string_view title, std::string_view y_label,
                       std::span<const SvgSeries> series) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::size_t n = 1;
  double y_min = 0.0, y_max = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](std::size_t i) { return kLeft + plot_w * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1)); };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = y_min + (y_max - y_min) * k / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
        << std::round(v * 10.0) / 10.0 << "</text>\n";
    const std::size_t i = (n - 1) * static_cast<std::size_t>(k) / 4;
    svg << "<text x=\"" << px(i) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
        << i + 1 << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">t</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  const std::size_t stride = std::max<std::size_t>(1, n / 500);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const auto& values = series[s].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i % stride != 0 && i + 1 != values.size()) continue;
      svg << px(i) << ',' << py(values[i]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(s + 1);
    svg << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 35 << "\" y=\"" << ly << "\">" << series[s].label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace driftbandit
