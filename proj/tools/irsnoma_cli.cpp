// Command-line front end: loads a JSON experiment configuration, runs the
// requested sweep and writes the result CSV. Flags override config values.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irsnoma/experiments.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string output_path;
    std::uint64_t trials = 0;
    bool trials_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool analytic_only = false;
    bool mc_only = false;
};

void add_common_options(CLI::App& cmd, CliOverrides& opts) {
    cmd.add_option("--config", opts.config_path, "JSON experiment configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd.add_option("--output", opts.output_path, "Output CSV path")->required();
    cmd.add_option("--trials", opts.trials, "Monte Carlo trials per point (overrides config)")
        ->check(CLI::PositiveNumber)
        ->each([&opts](const std::string&) { opts.trials_set = true; });
    cmd.add_option("--seed", opts.seed, "Monte Carlo seed (overrides config)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    auto* a = cmd.add_flag("--analytic-only", opts.analytic_only, "Skip the Monte Carlo source");
    auto* m = cmd.add_flag("--mc-only", opts.mc_only, "Skip the analytic source");
    a->excludes(m);
    m->excludes(a);
}

irsnoma::ExperimentSpec load_with_overrides(const CliOverrides& opts, irsnoma::SweepKind kind) {
    irsnoma::ExperimentSpec spec = irsnoma::load_config(opts.config_path);
    spec.sweep_kind = kind;
    if (opts.trials_set) spec.trials = opts.trials;
    if (opts.seed_set) spec.seed = opts.seed;
    if (opts.analytic_only) {
        spec.use_analytic = true;
        spec.use_montecarlo = false;
    }
    if (opts.mc_only) {
        spec.use_analytic = false;
        spec.use_montecarlo = true;
    }
    spec.validate();
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage analysis of a two-user uplink through a phase-split reflecting surface"};
    app.require_subcommand(1);

    CliOverrides alpha_opts;
    CLI::App* alpha_cmd =
        app.add_subcommand("alpha-sweep", "Outage vs split factor; CSV per (gap, threshold, split, ue)");
    add_common_options(*alpha_cmd, alpha_opts);

    CliOverrides robust_opts;
    CLI::App* robust_cmd =
        app.add_subcommand("robust-sweep", "Robust split factor vs threshold; CSV per (gap, threshold)");
    add_common_options(*robust_cmd, robust_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (alpha_cmd->parsed()) {
            const auto spec = load_with_overrides(alpha_opts, irsnoma::SweepKind::alpha_sweep);
            irsnoma::run_alpha_sweep(spec, alpha_opts.output_path);
            std::cerr << "wrote " << alpha_opts.output_path << "\n";
        } else {
            const auto spec = load_with_overrides(robust_opts, irsnoma::SweepKind::robust_vs_threshold);
            irsnoma::run_robust_sweep(spec, robust_opts.output_path);
            std::cerr << "wrote " << robust_opts.output_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
