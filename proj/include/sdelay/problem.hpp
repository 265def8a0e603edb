// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sdelay/semigroup.hpp"
#include "sdelay/spaces.hpp"

namespace sdelay {

enum class Backend { Transport, McKendrick, FiniteDim };

/// Scalar Lipschitz nonlinearity with f(0) = 0 (so the drift preserves the
/// C0 constraint and integrability on the half-line).
struct ScalarMap {
    enum class Kind { Zero, Linear, Sin, Tanh };
    Kind kind = Kind::Zero;
    double amp = 0.0;

    double operator()(double u) const;
    double lipschitz() const { return kind == Kind::Zero ? 0.0 : std::abs(amp); }
};

ScalarMap::Kind scalar_kind_from_string(const std::string& s);

/// Full problem specification: generator data, delay drift, additive noise,
/// initial data. Spatial profiles are kept as callables and sampled per
/// discretization level.
struct DelayProblem {
    Backend backend = Backend::Transport;

    // transport generator
    double mu_decay = 0.0;
    // McKendrick generator
    std::function<double(double)> mu_fn, b_fn;
    double w = 0.0;            // renewal weight, must exceed sup|b_mu|
    double trunc_length = 10;  // half-line truncation
    double sigma_support = 1;  // d: supp sigma in [0,d]
    RenewalConfig renewal;
    // finite-dimensional oracle generator
    std::vector<std::vector<double>> matrix;

    // delay drift phi(x,h)(xi) = int phi_k(theta,xi) h(theta,xi) dtheta
    //   + f1(x(xi)) + int k_k(theta,xi) f2(h(theta,xi)) dtheta
    std::function<double(double, double)> phi_kernel, k_kernel;  // (theta, xi)
    ScalarMap f1, f2;

    // additive noise columns psi_c, and initial data
    std::size_t noise_dim = 1;
    std::function<double(double, std::size_t)> psi_fn;  // (xi, channel)
    std::function<double(double)> x0_fn;
    std::function<double(double, double)> f0_fn;  // (theta, xi)

    double p = 2.0, q = 2.0;
    double horizon = 1.0;  // T
};

/// One discretization level of a DelayProblem.
struct Discretization {
    std::shared_ptr<const SpatialGrid> grid;
    std::shared_ptr<const Semigroup> sg;
    GridFunction x0;
    std::vector<GridFunction> psi;
    SegmentFunction f0;
    double dt = 0.0;
    std::size_t m_history = 0;  // history nodes per unit delay, 1/dt
    std::size_t n_steps = 0;    // horizon / dt
    // sampled kernel tables, [theta node][xi node]; empty when the kernel is null
    std::vector<std::vector<double>> phi_tab, k_tab;

    const DelayProblem* problem = nullptr;
};

/// Samples all profiles of `prob` on an n_space-point grid with time step dt.
/// 1/dt must be an integer so that segment extraction never interpolates.
Discretization discretize(const DelayProblem& prob, double dt, std::size_t n_space);

/// Pointwise-in-xi delay drift with trapezoidal theta quadrature.
GridFunction drift_phi(const Discretization& disc, const GridFunction& x,
                       const SegmentFunction& seg);

/// Mixed kernel norm ||.||_{C(or L^inf; L^{p'})} on the sampled table.
double kernel_mixed_norm(const Discretization& disc,
                         const std::vector<std::vector<double>>& tab, double p);

/// L = 2^{1/p} (L_{f1} v (L_{f2} ||k|| + ||phi||)).
double lipschitz_constant(const Discretization& disc);

/// Built-in scenarios with default coefficient profiles.
DelayProblem transport_scenario();
DelayProblem mckendrick_scenario();
DelayProblem finite_dim_scenario(std::size_t n = 1);

}  // namespace sdelay
