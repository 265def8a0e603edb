// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sdelay/semigroup.hpp"
#include "sdelay/spaces.hpp"

namespace sdelay {

/// Counter-based Gaussian stream: every draw is a pure function of
/// (seed, counter), so ensembles are reproducible at any thread count.
struct CounterRng {
    std::uint64_t seed;

    static std::uint64_t mix(std::uint64_t z);
    double uniform(std::uint64_t counter) const;   // open interval (0,1)
    double gaussian(std::uint64_t counter) const;  // standard normal
};

/// Sub-seed for ensemble member `member`, splitmix-style hash of the base seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t member);

/// Increments of a d-dimensional Wiener path on a uniform grid.
struct NoisePath {
    double dt = 0.0;
    std::size_t d = 1;
    std::uint64_t seed = 0;
    std::vector<double> increments;  // n_steps * d, variance dt per component

    std::size_t n_steps() const { return increments.size() / d; }
    double dW(std::size_t i, std::size_t c) const { return increments[i * d + c]; }
    /// W_c(t_k), the running sum of the first k increments.
    double level(std::size_t k, std::size_t c) const;
};

NoisePath sample_path(std::size_t n_steps, double dt, std::size_t d,
                      std::uint64_t seed);

/// Midpoint (Brownian bridge) subdivision: halves dt, coarse increments are
/// exactly the sums of the produced fine pairs.
NoisePath bridge_refine(const NoisePath& coarse, std::uint64_t level_tag);

/// Left-point Ito sum  sum_i S(t - t_i) psi_c dW_i^c  up to time t on the path grid.
GridFunction stochastic_convolution(const Semigroup& sg,
                                    const std::vector<GridFunction>& psi,
                                    const NoisePath& path, double t);

/// The convolution at every path node; shares one table of S(j dt) psi.
std::vector<GridFunction> stochastic_convolution_path(
    const Semigroup& sg, const std::vector<GridFunction>& psi, const NoisePath& path);

/// Haar system on L^2(0,t_len): h_0 plus 2^{n-1} wavelets per level n <= depth,
/// stored as piecewise constants on 2^depth cells (exact dyadic breakpoints).
struct HaarBasis {
    double t_len = 1.0;
    std::size_t n_cells = 1;
    std::vector<std::vector<double>> funcs;  // per function, value per cell

    double cell_width() const { return t_len / static_cast<double>(n_cells); }
    /// Inner product in L^2(0,t_len) of two members.
    double inner(std::size_t i, std::size_t j) const;
};

HaarBasis haar_basis(std::size_t depth, double t_len = 1.0);

/// Operator H -> E realized through its kernel: R f = int_0^t K(u) f(u) du,
/// with K(u) given per H-dimension. Cell integrals use the midpoint rule.
struct KernelOperator {
    double t_len = 1.0;
    std::size_t d = 1;
    std::function<GridFunction(double u, std::size_t c)> column;
};

struct GammaEstimate {
    double second_moment = 0.0;  // estimate of E || sum_j gamma_j R h_j ||^2
    double std_error = 0.0;
    double norm() const;
};

/// Images R h_j for every basis member and H-dimension, in basis order.
std::vector<GridFunction> kernel_images(const KernelOperator& R, const HaarBasis& basis);

GammaEstimate gamma_norm_estimate(const KernelOperator& R, const HaarBasis& basis,
                                  std::size_t n_mc, std::uint64_t seed);

/// Monte Carlo second moment over precomputed images (shared Gaussian draws).
GammaEstimate gamma_second_moment(const std::vector<GridFunction>& images,
                                  std::size_t n_mc, std::uint64_t seed);

/// Estimates for nested truncation depths 0..depth, shared draws across depths.
std::vector<GammaEstimate> gamma_norm_depth_sweep(const KernelOperator& R,
                                                  std::size_t depth, double t_len,
                                                  std::size_t n_mc,
                                                  std::uint64_t seed);

/// Frobenius norm of a dense matrix (rows = E-coordinates), the Hilbert-space
/// specialization of the gamma norm.
double gamma_norm_hs_oracle(const std::vector<std::vector<double>>& matrix);

/// max over an s-grid of the gamma-norm estimate of
/// u |-> (s-u)^{-alpha} S(s-u) psi on L^2(0,s;H).
struct WeightedGammaResult {
    double sup = 0.0;
    std::vector<double> per_s;  // gamma-norm estimate at each s-grid point
    std::vector<double> s_grid;
};

WeightedGammaResult weighted_gamma_sup(const Semigroup& sg,
                                       const std::vector<GridFunction>& psi,
                                       double alpha, double t, std::size_t depth,
                                       std::size_t n_mc, std::size_t n_s,
                                       std::uint64_t seed);

}  // namespace sdelay
