// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdelay {

enum class GridKind { UnitInterval, HalfLine };

/// Uniform spatial grid on [0,1] or on a truncated half-line [0,L].
struct SpatialGrid {
    GridKind kind;
    std::size_t n_points;
    double truncation_length;  // 1 for UnitInterval
    std::vector<double> nodes;

    static std::shared_ptr<const SpatialGrid> unit_interval(std::size_t n);
    static std::shared_ptr<const SpatialGrid> half_line(std::size_t n, double length);

    double spacing() const { return nodes[1] - nodes[0]; }
};

enum class SpaceTag {
    C0,          // sup-norm, f(0)=0
    L1,          // integral norm
    L1Weighted,  // integral of |f| e^{-w a}
    Euclidean,   // finite-dimensional oracle backend, l2 norm
};

/// Discretized element of the state space E: values aligned with grid nodes.
struct GridFunction {
    std::shared_ptr<const SpatialGrid> grid;
    std::vector<double> values;
    SpaceTag tag = SpaceTag::C0;
    double weight = 0.0;  // L1Weighted only, must be > 0

    GridFunction() = default;
    GridFunction(std::shared_ptr<const SpatialGrid> g, SpaceTag t, double w = 0.0);

    std::size_t size() const { return values.size(); }
    void validate() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Composite trapezoid of the sampled values on the function's grid.
double trapezoid(const std::vector<double>& values, double h);

double norm_E(const GridFunction& x);

/// Discretized history element of L^p(-1,0;E); frames at theta = -1 + j*dt.
struct SegmentFunction {
    std::vector<GridFunction> frames;  // m_history + 1 frames, theta in [-1,0]
    double p = 2.0;

    std::size_t m_history() const { return frames.empty() ? 0 : frames.size() - 1; }
    double theta_step() const { return 1.0 / static_cast<double>(m_history()); }
    void validate() const;
};

/// Element of the product space E x L^p(-1,0;E).
struct LiftedState {
    GridFunction head;
    SegmentFunction tail;
};

double norm_Ep(const LiftedState& y, double p);

/// Time-indexed family of states on a uniform grid 0..T with step dt.
struct Trajectory {
    double dt = 0.0;
    std::vector<GridFunction> states;

    std::size_t n_steps() const { return states.empty() ? 0 : states.size() - 1; }
    double horizon() const { return dt * static_cast<double>(n_steps()); }
    std::size_t index_of(double t) const;
};

/// X_t(theta) = X(t+theta); reads the initial history f0 where t+theta < 0.
SegmentFunction segment_extract(const Trajectory& traj, const SegmentFunction& f0,
                                double t, double p);

/// sup_s e^{-beta s} (ensemble mean of ||X(s)||^q)^{1/q}.
double bielecki_norm(const std::vector<Trajectory>& ensemble, double beta, double q);

}  // namespace sdelay
