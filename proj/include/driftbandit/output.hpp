#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftbandit/harness.hpp"

namespace driftbandit {

inline constexpr std::string_view kTraceHeader =
    "rep,t,batch,arm,greedy,comp,drift,true_reward,obs_reward,cum_pseudo_regret,"
    "cum_realized_regret,cum_comp";
inline constexpr std::string_view kPlotHeader = "t,mean_metric,stderr";

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Summary JSON: config, resolved parameters and seeds, mean/stderr of every
/// metric. Byte-identical for identical inputs.
std::string summary_json(const AggregateSummary& summary);

/// Trace rows (arms 1-indexed). Writes the header when `header` is set.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows, bool header = true);

/// `t,mean_metric,stderr`, every `stride`-th step plus the last one.
void write_plot_csv(std::ostream& out, std::span<const double> mean, std::span<const double> se,
                    std::size_t stride = 1);

struct SvgSeries {
  std::string label;
  std::vector<double> values;  // value at t = 1..n
};

/// Minimal static line chart.
std::string render_svg(std::string_view title, std::string_view y_label,
                       std::span<const SvgSeries> series);

}  // namespace driftbandit
