#pragma once

// Sweep output: CSV with a JSON metadata header line and full round-trip
// numeric precision, plus a static log-log SVG plot with error bars. Both
// emitters are deterministic byte-for-byte.

#include <string>
#include <vector>

#include "chanest/config.hpp"
#include "chanest/mc.hpp"

namespace chanest {

// Columns: sigma_s2, lb, lb_se, mmse_t1, mmse_t1_se, mmse_oracle,
// mmse_oracle_se, lmmse, asymptote. Quantities that were not computed are
// written as nan. The first line is a '#'-prefixed JSON object recording
// seed, trial counts, grid, and version.
std::string sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

// One polyline per requested quantity on log-log axes, 95% error bars on the
// Monte-Carlo quantities, a legend, and decade ticks. Needs >= 2 rows.
std::string sweep_svg(const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& quantities);

void write_file(const std::string& path, const std::string& content);

}  // namespace chanest
