// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "sdelay/solver.hpp"

namespace sdelay {

/// Dual element paired against states by weighted quadrature (a density for
/// the function-space backends, a plain vector in the finite-dimensional one),
/// together with the precomputed discrete adjoint action A_h^* x^*.
struct TestFunctional {
    std::string id;
    GridFunction density;
    GridFunction adjoint_action;
};

/// <x, x*>: trapezoid quadrature of x * density (dot product when Euclidean).
double pair_functional(const GridFunction& x, const GridFunction& density);

/// Dense discrete generator A_h for the problem's backend: upwind first-order
/// difference with the C0 boundary row zeroed (transport), upwind plus a
/// forward-difference age-zero row (McKendrick), or the given matrix.
std::vector<std::vector<double>> generator_matrix(const Discretization& disc);

GridFunction apply_matrix(const std::vector<std::vector<double>>& a,
                          const GridFunction& x);

/// Builds the functional with its adjoint action a = D^{-1} A_h^T D rho,
/// where D holds the quadrature weights of pair_functional.
TestFunctional make_functional(const Discretization& disc, std::string id,
                               GridFunction density);

/// 10 fixed compactly supported bumps plus n_random random smooth profiles.
std::vector<TestFunctional> functional_suite(const Discretization& disc,
                                             std::size_t n_random,
                                             std::uint64_t seed);

/// |<X(t),x*> - <x0,x*> - int <X, A*x*> - int <phi(X,X_s),x*> - sum_c <psi_c,x*> W_c(t)|
double weak_residual(const Discretization& disc, const Trajectory& traj,
                     const NoisePath& path, const TestFunctional& f, double t);

/// ||X(t) - mild_evaluate(t)||_E with the trapezoid Bochner rule, so the
/// residual measures time-quadrature error instead of the solver tolerance.
double mild_residual(const Discretization& disc, const Trajectory& traj,
                     const NoisePath& path, double t);

struct StrongResidual {
    double value = 0.0;
    bool skipped = false;       // nonlocal boundary row too distorted to trust
    double boundary_defect = 0.0;
};

/// ||X(t) - x0 - A_h int X - int phi - sum_c psi_c W_c(t)||_E.
StrongResidual strong_residual(const Discretization& disc, const Trajectory& traj,
                               const NoisePath& path, double t);

struct LevelReport {
    double dt = 0.0;
    double dxi = 0.0;
    double mild = 0.0;
    double strong = 0.0;
    bool strong_skipped = false;
    std::vector<std::pair<std::string, double>> weak;  // per functional
    double weak_max = 0.0;
};

struct EquivalenceReport {
    std::vector<LevelReport> levels;
    std::vector<double> weak_orders, mild_orders, strong_orders;  // per doubling
    bool monotone = false;
    bool divergence_pair = false;
    double tol = 0.0;
    std::uint64_t seed = 0;
};

struct VerifyConfig {
    std::size_t levels = 3;
    double dt0 = 1.0 / 64.0;  // coarsest step, halved per level
    std::size_t n_space = 129;
    std::size_t n_random_functionals = 5;
    std::uint64_t seed = 1;
    PicardConfig picard;
    std::size_t n_threads = 1;
};

/// One Picard solve per refinement level on bridge-consistent noise; all three
/// residuals at the horizon, empirical orders, and the joint-vanishing verdict.
/// When residual_prob is given, the residuals are evaluated against that
/// problem instead of the one that was solved (fault-injection probes).
EquivalenceReport equivalence_report(const DelayProblem& prob, const VerifyConfig& cfg,
                                     const DelayProblem* residual_prob = nullptr);

struct CovarianceProbe {
    std::size_t node = 0;
    double mc_variance = 0.0;
    double oracle = 0.0;
    double std_error = 0.0;
    double z = 0.0;  // standardized discrepancy
};

struct CovarianceReport {
    std::vector<CovarianceProbe> probes;
    double max_abs_z = 0.0;
};

/// Monte Carlo variance of the stochastic convolution at probe nodes against
/// the Ito-isometry quadrature of Q(t); requires F = 0.
CovarianceReport covariance_oracle_check(const DelayProblem& prob, double dt,
                                         std::size_t n_space, double t,
                                         std::size_t n_mc,
                                         const std::vector<std::size_t>& probes,
                                         std::uint64_t seed,
                                         std::size_t n_threads = 1);

}  // namespace sdelay
