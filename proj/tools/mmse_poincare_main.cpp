// Command-line front end: run SNR sweeps from a config file or preset, list
// presets, or run the fast self-check suite.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chanest/config.hpp"
#include "chanest/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"MMSE, LMMSE, and Poincare lower bound for Gaussian channels with blockage"};
    app.require_subcommand(1);

    std::string source;
    std::uint64_t trials = 0, seed = 0, lb_trials = 0, inner_trials = 0;
    bool has_seed = false;
    std::string csv_path, svg_path;

    CLI::App* run = app.add_subcommand("run", "run an SNR sweep from a config file or preset");
    run->add_option("config", source, "config file path or preset name")->required();
    run->add_option("--trials", trials, "override Monte-Carlo trials per grid point");
    run->add_option("--lb-trials", lb_trials, "override outer trials of the lower bound");
    run->add_option("--inner-trials", inner_trials, "override inner draws of the lower bound");
    run->add_option("--seed", seed, "override the experiment seed")
        ->each([&](const std::string&) { has_seed = true; });
    run->add_option("--csv", csv_path, "override the CSV output path");
    run->add_option("--svg", svg_path, "override the SVG output path");

    CLI::App* check = app.add_subcommand("check", "run the fast invariant suite");
    CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const std::string& name : chanest::preset_names()) std::cout << name << "\n";
            return 0;
        }
        if (check->parsed()) {
            return chanest::run_check(std::cout) == 0 ? 0 : 1;
        }
        chanest::ExperimentConfig cfg = chanest::load_config(source);
        if (trials > 0) cfg.trials = trials;
        if (lb_trials > 0) cfg.lb_trials = lb_trials;
        if (inner_trials > 0) cfg.inner_trials = inner_trials;
        if (has_seed) cfg.seed = seed;
        if (!csv_path.empty()) cfg.csv_path = csv_path;
        if (!svg_path.empty()) cfg.svg_path = svg_path;
        cfg.validate();

        std::cout << "running " << cfg.name << " (" << cfg.model << ", " << cfg.grid.size()
                  << " grid points, trials " << cfg.trials << ", seed " << cfg.seed << ")\n";
        const chanest::RunResult result = chanest::run_experiment(cfg, std::cout);
        if (!result.csv_path.empty()) std::cout << "wrote " << result.csv_path << "\n";
        if (!result.svg_path.empty()) std::cout << "wrote " << result.svg_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
