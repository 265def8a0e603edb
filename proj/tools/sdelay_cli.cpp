// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sdelay/cli.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t levels = 0;
    std::size_t threads = 0;
    bool have_seed = false, have_levels = false, have_threads = false;
};

void add_common(CLI::App* sub, CommonFlags& fl) {
    sub->add_option("--config", fl.config, "scenario configuration (JSON)");
    sub->add_option("--out", fl.out, "output directory");
    sub->add_option("--seed", fl.seed, "base RNG seed")
        ->each([&fl](const std::string&) { fl.have_seed = true; });
    sub->add_option("--levels", fl.levels, "refinement levels")
        ->each([&fl](const std::string&) { fl.have_levels = true; });
    sub->add_option("--threads", fl.threads, "worker threads")
        ->each([&fl](const std::string&) { fl.have_threads = true; });
}

sdelay::cli::ScenarioConfig resolve(const CommonFlags& fl) {
    auto cfg = fl.config.empty() ? sdelay::cli::default_config("transport")
                                 : sdelay::cli::parse_config(fl.config);
    if (!fl.out.empty()) cfg.out_dir = fl.out;
    if (fl.have_seed) cfg.seed = fl.seed;
    if (fl.have_levels) cfg.levels = fl.levels;
    if (fl.have_threads) cfg.threads = fl.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic delay evolution: simulation and verification"};
    app.require_subcommand(0, 1);

    bool list = false;
    app.add_flag("--list-scenarios", list, "print known scenarios and exit");

    CommonFlags fs, fv, fg, fo;
    auto* sim = app.add_subcommand("simulate", "sample paths and moment tables");
    add_common(sim, fs);
    auto* ver = app.add_subcommand("verify", "run the equivalence verdict suite");
    add_common(ver, fv);
    auto* gam = app.add_subcommand("gamma-norm", "gamma-radonifying norm study");
    add_common(gam, fg);
    auto* ora = app.add_subcommand("oracle", "closed-form oracle cross-checks");
    add_common(ora, fo);

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& s : sdelay::cli::list_scenarios()) std::printf("%s\n", s.c_str());
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 2;
    }

    try {
        if (sim->parsed()) return sdelay::cli::run_simulate(resolve(fs));
        if (ver->parsed()) return sdelay::cli::run_verify(resolve(fv));
        if (gam->parsed()) return sdelay::cli::run_gamma_norm(resolve(fg));
        if (ora->parsed()) return sdelay::cli::run_oracle(resolve(fo));
    } catch (const sdelay::cli::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const sdelay::cli::VerificationFailure& e) {
        std::fprintf(stderr, "verification failed: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    }
    return 2;
}
