// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "sdelay/verifier.hpp"

namespace sdelay::cli {

/// Schema or hypothesis violation in a scenario configuration (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Verification verdict FAIL (exit code 1).
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string scenario = "transport";

    double horizon = 1.0;
    double p = 2.0, q = 2.0;
    double dt = 1.0 / 64.0;
    std::size_t n_space = 65;
    std::size_t levels = 3;
    std::size_t ensemble = 64;
    std::size_t threads = 1;
    std::uint64_t seed = 1;
    PicardConfig picard;

    // scenario knobs (profiles themselves are the built-in scenario shapes)
    double transport_mu = 0.4;
    double mck_w = 1.5;
    double mck_trunc = 10.0;
    double mck_sigma_support = 1.0;
    std::size_t fd_dim = 2;
    bool drift_enabled = true;
    bool fault_injection = false;

    // gamma-norm study parameters
    double gamma_alpha = 0.3;
    std::size_t gamma_depth = 8;
    std::size_t gamma_n_mc = 20000;
    std::size_t weighted_depth = 6;
    std::size_t weighted_n_mc = 2000;
    std::size_t weighted_n_s = 8;

    std::string out_dir = "out";
    std::uint64_t config_hash = 0;  // FNV-1a of the config file bytes
};

std::vector<std::string> list_scenarios();

/// Default config for a named scenario; unknown names raise ConfigError
/// listing the valid ones.
ScenarioConfig default_config(const std::string& scenario);

/// Reads a JSON config file; every schema or hypothesis violation is a named
/// ConfigError, never a warning.
ScenarioConfig parse_config(const std::string& path);

/// Instantiates the DelayProblem and validates the scenario's hypothesis
/// checklist (contraction weight, sigma support and square-integrability,
/// finite Lipschitz data, integer 1/dt).
DelayProblem build_problem(const ScenarioConfig& cfg);

int run_simulate(const ScenarioConfig& cfg);
int run_verify(const ScenarioConfig& cfg);
int run_gamma_norm(const ScenarioConfig& cfg);
int run_oracle(const ScenarioConfig& cfg);

}  // namespace sdelay::cli
