// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sdelay/spaces.hpp"

namespace sdelay {

/// Strongly continuous semigroup acting on discretized elements of E.
class Semigroup {
  public:
    virtual ~Semigroup() = default;
    virtual GridFunction apply(double t, const GridFunction& x) const = 0;
};

/// Nilpotent transport semigroup on C0([0,1]):
/// (S(t)x)(xi) = e^{-mu t} x(xi - t) for xi >= t, 0 otherwise; S(t) = 0 for t >= 1.
/// Shift amounts are rounded to the nearest grid index; the rounded time also
/// enters the decay factor so that composed applies agree with a single apply
/// whenever the shifts align.
class TransportSemigroup final : public Semigroup {
  public:
    TransportSemigroup(std::shared_ptr<const SpatialGrid> grid, double mu_decay);
    GridFunction apply(double t, const GridFunction& x) const override;

    double mu() const { return mu_; }
    const std::shared_ptr<const SpatialGrid>& grid() const { return grid_; }

  private:
    std::shared_ptr<const SpatialGrid> grid_;
    double mu_;
};

struct RenewalConfig {
    double tol = 1e-12;
    std::size_t max_iter = 200;
};

/// McKendrick semigroup on L1(0,L): S(t)g(a) = e^{-int_{a-t}^a mu} g~(a-t),
/// where the backward extension g~(-a) = g2(a) solves the renewal equation
/// g2 = b_mu * g2 + T_{mu,b} g by fixed-point iteration in the w-weighted norm.
class McKendrickSemigroup final : public Semigroup {
  public:
    McKendrickSemigroup(std::shared_ptr<const SpatialGrid> grid, GridFunction mu,
                        GridFunction b, double w, double horizon,
                        RenewalConfig cfg = {});

    GridFunction apply(double t, const GridFunction& g) const override;

    /// (mu,b)-extension of g on [0,horizon], tagged L1Weighted(w).
    GridFunction extension(const GridFunction& g) const;

    /// Renewal residual ||g2 - b_mu*g2 - T g|| in the w-weighted norm.
    double renewal_residual(const GridFunction& g, const GridFunction& g2) const;

    double b_mu_sup() const { return b_mu_sup_; }
    double w() const { return w_; }
    std::size_t last_iterations() const { return last_iterations_; }
    double last_contraction_factor() const { return last_contraction_; }

    /// L1 mass of S(t)1 escaping the truncation boundary relative to e^{-..}
    /// decay alone; used to validate the half-line truncation.
    double boundary_escape_mass(double t) const;

  private:
    std::vector<double> convolve_bmu(const std::vector<double>& f) const;
    std::vector<double> renewal_source(const GridFunction& g) const;
    double weighted_norm(const std::vector<double>& f) const;

    std::shared_ptr<const SpatialGrid> grid_;
    GridFunction mu_, b_;
    double w_, horizon_;
    RenewalConfig cfg_;
    std::vector<double> cum_mu_;  // trapezoid table of int_0^a mu
    std::vector<double> b_mu_;    // e^{-int_0^s mu} b(s)
    double b_mu_sup_ = 0.0;
    std::size_t n_renewal_ = 0;  // renewal grid nodes covering [0,horizon]
    mutable std::size_t last_iterations_ = 0;
    mutable double last_contraction_ = 0.0;
};

/// exp(tM) on R^n, the dense-matrix oracle backend.
class FiniteDimSemigroup final : public Semigroup {
  public:
    explicit FiniteDimSemigroup(std::vector<std::vector<double>> matrix);
    GridFunction apply(double t, const GridFunction& v) const override;
    std::vector<double> apply_vec(double t, const std::vector<double>& v) const;
    std::size_t dim() const { return n_; }

  private:
    std::size_t n_;
    std::vector<double> m_;  // row-major
    std::shared_ptr<const SpatialGrid> index_grid_;
};

/// Tail block S_s of the delay semigroup: (S_s x)(theta) = S(theta+s)x on
/// (-s v -1, 0], zero below; the boundary point takes the S branch.
SegmentFunction s_curl_apply(const Semigroup& inner, double s, const GridFunction& x,
                             std::size_t m_history, double p);

/// Pure left translation block: (T_l(t)f)(theta) = f(theta+t) where
/// theta + t <= 0, zero above.
SegmentFunction left_translation_apply(double t, const SegmentFunction& f);

/// Block-matrix delay semigroup T(t) = [[S(t),0],[S_t,T_l(t)]] applied to a
/// lifted state. The tail is assembled pointwise in theta so the two blocks
/// never overlap at theta + t = 0.
LiftedState delay_semigroup_apply(const Semigroup& inner, double t,
                                  const LiftedState& y, double p);

}  // namespace sdelay
