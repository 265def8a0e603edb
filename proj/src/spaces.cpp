// SPDX-License-Identifier: Apache-2.0
#include "sdelay/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace sdelay {

std::shared_ptr<const SpatialGrid> SpatialGrid::unit_interval(std::size_t n) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes");
    auto g = std::make_shared<SpatialGrid>();
    g->kind = GridKind::UnitInterval;
    g->n_points = n;
    g->truncation_length = 1.0;
    g->nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g->nodes[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

std::shared_ptr<const SpatialGrid> SpatialGrid::half_line(std::size_t n, double length) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes");
    if (length <= 0.0) throw std::invalid_argument("truncation length must be positive");
    auto g = std::make_shared<SpatialGrid>();
    g->kind = GridKind::HalfLine;
    g->n_points = n;
    g->truncation_length = length;
    g->nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g->nodes[i] = length * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

GridFunction::GridFunction(std::shared_ptr<const SpatialGrid> g, SpaceTag t, double w)
    : grid(std::move(g)), tag(t), weight(w) {
    values.assign(grid->n_points, 0.0);
}

void GridFunction::validate() const {
    if (!grid) throw std::invalid_argument("GridFunction without grid");
    if (values.size() != grid->n_points)
        throw std::invalid_argument("values length does not match grid");
    if (tag == SpaceTag::C0 && values.front() != 0.0)
        throw std::invalid_argument("C0 function must vanish at the left endpoint");
    if (tag == SpaceTag::L1Weighted && weight <= 0.0)
        throw std::invalid_argument("L1Weighted needs weight > 0");
}

static void check_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    check_same_grid(*this, other);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    check_same_grid(*this, other);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (auto& v : values) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double trapezoid(const std::vector<double>& values, double h) {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * h;
}

double norm_E(const GridFunction& x) {
    if (!x.grid || x.values.empty()) throw std::invalid_argument("empty grid");
    switch (x.tag) {
        case SpaceTag::C0: {
            double m = 0.0;
            for (double v : x.values) m = std::max(m, std::abs(v));
            return m;
        }
        case SpaceTag::L1: {
            std::vector<double> a(x.values.size());
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(x.values[i]);
            return trapezoid(a, x.grid->spacing());
        }
        case SpaceTag::L1Weighted: {
            std::vector<double> a(x.values.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] = std::abs(x.values[i]) * std::exp(-x.weight * x.grid->nodes[i]);
            return trapezoid(a, x.grid->spacing());
        }
        case SpaceTag::Euclidean: {
            double s = 0.0;
            for (double v : x.values) s += v * v;
            return std::sqrt(s);
        }
    }
    throw std::logic_error("unreachable");
}

void SegmentFunction::validate() const {
    if (frames.size() < 2)
        throw std::invalid_argument("segment needs both endpoints -1 and 0");
    for (const auto& f : frames)
        if (f.values.size() != frames.front().values.size())
            throw std::invalid_argument("segment frames on mismatched grids");
    if (p < 1.0) throw std::invalid_argument("p must be >= 1");
}

double norm_Ep(const LiftedState& y, double p) {
    if (p < 1.0) throw std::invalid_argument("p must be >= 1");
    if (!y.tail.frames.empty() &&
        y.tail.frames.front().values.size() != y.head.values.size())
        throw std::invalid_argument("head/tail grid mismatch");
    std::vector<double> pw(y.tail.frames.size());
    for (std::size_t j = 0; j < pw.size(); ++j)
        pw[j] = std::pow(norm_E(y.tail.frames[j]), p);
    double tail_p = trapezoid(pw, y.tail.theta_step());
    return norm_E(y.head) + std::pow(tail_p, 1.0 / p);
}

std::size_t Trajectory::index_of(double t) const {
    double k = t / dt;
    auto n = static_cast<long long>(std::llround(k));
    if (std::abs(k - static_cast<double>(n)) > 1e-9)
        throw std::invalid_argument("time off the trajectory grid");
    if (n < 0 || static_cast<std::size_t>(n) >= states.size())
        throw std::invalid_argument("time outside trajectory span");
    return static_cast<std::size_t>(n);
}

SegmentFunction segment_extract(const Trajectory& traj, const SegmentFunction& f0,
                                double t, double p) {
    const auto k = static_cast<long long>(traj.index_of(t));
    const auto m = static_cast<long long>(f0.m_history());
    SegmentFunction seg;
    seg.p = p;
    seg.frames.reserve(static_cast<std::size_t>(m) + 1);
    for (long long j = 0; j <= m; ++j) {
        const long long idx = k - m + j;  // node at time t - 1 + j*dt
        if (idx >= 0)
            seg.frames.push_back(traj.states[static_cast<std::size_t>(idx)]);
        else
            seg.frames.push_back(f0.frames[static_cast<std::size_t>(idx + m)]);
    }
    return seg;
}

double bielecki_norm(const std::vector<Trajectory>& ensemble, double beta, double q) {
    if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
    if (beta < 0.0 || q < 1.0) throw std::invalid_argument("need beta >= 0, q >= 1");
    const auto& t0 = ensemble.front();
    for (const auto& tr : ensemble)
        if (tr.states.size() != t0.states.size() || tr.dt != t0.dt)
            throw std::invalid_argument("ensemble trajectories on mismatched time grids");
    double sup = 0.0;
    for (std::size_t n = 0; n < t0.states.size(); ++n) {
        double mq = 0.0;
        for (const auto& tr : ensemble) mq += std::pow(norm_E(tr.states[n]), q);
        mq /= static_cast<double>(ensemble.size());
        const double s = t0.dt * static_cast<double>(n);
        sup = std::max(sup, std::exp(-beta * s) * std::pow(mq, 1.0 / q));
    }
    return sup;
}

}  // namespace sdelay
