# SPDX-License-Identifier: Apache-2.0
"""Simulation and verification of stochastic delay evolution equations."""

try:
    from ._sdelay import ConfigError, gamma_sweep, list_scenarios, solve_one, verify
except ImportError:  # running against a build tree, module next to the package
    from _sdelay import ConfigError, gamma_sweep, list_scenarios, solve_one, verify

__all__ = ["ConfigError", "gamma_sweep", "list_scenarios", "solve_one", "verify"]
