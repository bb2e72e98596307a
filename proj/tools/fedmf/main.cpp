#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonFlags {
    std::string config;
    fedmf::cli::Overrides overrides;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
    cmd.add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd.add_option("--alpha", f.overrides.alphas, "power rounds (comma list)")->delimiter(',');
    cmd.add_option("--rank", f.overrides.ranks, "latent dimension r (comma list)")->delimiter(',');
    cmd.add_option("--momentum", f.overrides.momenta, "none, nesterov or both")->delimiter(',');
    cmd.add_option("--trials", f.trials, "trials per grid cell");
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--out", f.out, "output directory");
}

fedmf::cli::ExperimentConfig resolve(CommonFlags& f) {
    fedmf::cli::ExperimentConfig config;
    if (!f.config.empty()) config = fedmf::cli::load_config(f.config);
    f.overrides.trials = f.trials;
    f.overrides.seed = f.seed;
    if (f.out) f.overrides.output_dir = *f.out;
    fedmf::cli::apply_overrides(config, f.overrides);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated low-rank matrix factorisation experiments"};
    app.require_subcommand(1);

    CommonFlags generate_flags, run_flags, bounds_flags;
    CLI::App* generate = app.add_subcommand("generate", "write client shards and a manifest");
    CLI::App* run = app.add_subcommand("run", "run the federated solver over the grid");
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate the closed-form bounds");
    add_common(*generate, generate_flags);
    add_common(*run, run_flags);
    add_common(*bounds, bounds_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (generate->parsed()) {
            const auto path = fedmf::cli::cmd_generate(resolve(generate_flags));
            std::cout << path.string() << '\n';
        } else if (run->parsed()) {
            for (const auto& path : fedmf::cli::cmd_run(resolve(run_flags))) {
                std::cout << path.string() << '\n';
            }
        } else {
            const auto config = resolve(bounds_flags);
            fedmf::cli::cmd_bounds(config);
            std::cout << (config.output_dir / "bounds.json").string() << '\n';
        }
    } catch (const fedmf::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}
