// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sdelay/noise.hpp"
#include "sdelay/problem.hpp"

namespace sdelay {

struct PicardConfig {
    double beta = 0.0;  // Bielecki weight; 0 selects 2 L T automatically
    double tol = 1e-10;
    std::size_t max_iter = 60;
};

struct PicardResult {
    Trajectory traj;
    std::size_t iterations = 0;
    double contraction_estimate = 0.0;
    double final_distance = 0.0;
    double beta_used = 0.0;
};

/// Iterates the variation-of-constants map from the free evolution until the
/// per-path sup-over-grid distance of successive iterates drops below tol.
/// The stochastic convolution is computed once and reused; the Bochner term
/// uses the left-point rule matching the Ito sum.
PicardResult picard_solve(const Discretization& disc, const NoisePath& path,
                          const PicardConfig& cfg);

enum class BochnerRule { LeftPoint, Trapezoid };

/// Right-hand side of the variation-of-constants identity at time t,
/// assembled from an existing trajectory. The solver uses the left-point
/// rule; the verifier evaluates with the trapezoid rule so the residual
/// reflects time-quadrature error rather than the fixed-point tolerance.
GridFunction mild_evaluate(const Discretization& disc, const Trajectory& traj,
                           const NoisePath& path, double t,
                           BochnerRule rule = BochnerRule::LeftPoint);

/// Markovian-lift solve in E x L^p(-1,0;E). Runs the same Picard machinery
/// through the delay semigroup blocks with a trapezoid Bochner rule, so the
/// head agrees with picard_solve only up to the time-discretization order.
struct LiftResult {
    Trajectory heads;                    // pi_1 of the lift
    std::vector<GridFunction> tailbase;  // tail reads at node k, theta < 0
    SegmentFunction f0;
    std::size_t iterations = 0;
    double final_distance = 0.0;

    LiftedState state_at(std::size_t n) const;
};

LiftResult markov_lift_solve(const Discretization& disc, const NoisePath& path,
                             const PicardConfig& cfg);

}  // namespace sdelay
