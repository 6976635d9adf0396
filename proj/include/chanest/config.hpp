#pragma once

// Experiment configuration: a small key = value format (one pair per line,
// '#' comments), named presets for the built-in figure reproductions, and
// the mapping onto channel specs. Channel validation rules are enforced at
// parse time with the offending key named in the diagnostic.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chanest/scalar_channel.hpp"
#include "chanest/vector_channel.hpp"

namespace chanest {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string name = "custom";
    std::string model = "scalar";  // "scalar" | "vector"
    double alpha = 0.4;
    double sigma_h2 = 1.0;
    std::vector<double> grid;  // sigma_s2 values, positive
    std::uint64_t trials = 1000000;
    std::uint64_t inner_trials = 2000;  // vector bound / scalar nested-MC inner draws
    std::uint64_t lb_trials = 0;        // 0 = derived default (see effective_lb_trials)
    std::uint64_t seed = 1;
    std::string csv_path;
    std::string svg_path;
    // Subset of {lb, mmse_t1, mmse_oracle, lmmse, asymptote}, canonical order.
    std::vector<std::string> quantities{"lb", "mmse_t1", "mmse_oracle", "lmmse", "asymptote"};

    // scalar model
    std::vector<PilotAtom> pilot_scalar{{1.0, 1.0}};
    std::string inner_method = "quadrature";  // "quadrature" | "mc"

    // vector model
    std::size_t m = 4, n = 4, t = 4;
    std::string pilot_matrix_text = "identity";
    std::optional<double> power_budget;

    bool wants(const std::string& quantity) const;
    // The bound's outer trial count: scalar runs at `trials`; the vector
    // bound nests inner_trials draws per outer trial, so it defaults to
    // trials / 100 (at least 2000) to keep desk-scale runtimes.
    std::uint64_t effective_lb_trials() const;

    ScalarChannelSpec scalar_spec(double sigma_s2) const;
    VectorChannelSpec vector_spec(double sigma_s2) const;

    // Constructs the channel spec at the first grid point, surfacing channel
    // validation failures.
    void validate() const;
};

std::vector<double> make_log_grid(double lo, double hi, std::size_t points);

// Parses the documented key = value format; diagnostics name the line and key.
ExperimentConfig parse_config(const std::string& text);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);  // throws on unknown name

// `source` is a preset name or a path to a config file.
ExperimentConfig load_config(const std::string& source);

}  // namespace chanest
