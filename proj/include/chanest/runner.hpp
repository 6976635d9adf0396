#pragma once

// Experiment front door: run a configured sweep and write its artifacts, or
// run the fast self-check suite (gradient and identity checks, density
// normalizations, stream determinism).

#include <iosfwd>
#include <string>
#include <vector>

#include "chanest/config.hpp"
#include "chanest/mc.hpp"

namespace chanest {

struct RunResult {
    std::vector<SweepRow> rows;
    std::string csv_path;
    std::string svg_path;
};

// Computes one SweepRow for the configured model at the given noise level.
SweepRow compute_row(const ExperimentConfig& cfg, double sigma_s2, std::uint64_t point_seed);

// Runs the full sweep and writes CSV (and SVG when configured). Output files
// are written only after the whole sweep succeeds, so a failure never leaves
// a partial CSV behind.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Fast invariant suite; prints one line per check, returns the number of
// failures.
int run_check(std::ostream& out);

}  // namespace chanest
