// SPDX-License-Identifier: Apache-2.0
#include "sdelay/problem.hpp"

#include <cmath>
#include <numbers>

namespace sdelay {

double ScalarMap::operator()(double u) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return amp * u;
        case Kind::Sin: return amp * std::sin(u);
        case Kind::Tanh: return amp * std::tanh(u);
    }
    return 0.0;
}

ScalarMap::Kind scalar_kind_from_string(const std::string& s) {
    if (s == "zero") return ScalarMap::Kind::Zero;
    if (s == "linear") return ScalarMap::Kind::Linear;
    if (s == "sin") return ScalarMap::Kind::Sin;
    if (s == "tanh") return ScalarMap::Kind::Tanh;
    throw std::invalid_argument("unknown scalar map kind: " + s);
}

Discretization discretize(const DelayProblem& prob, double dt, std::size_t n_space) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    const double m_real = 1.0 / dt;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (std::abs(m_real - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("1/dt must be an integer");

    Discretization disc;
    disc.problem = &prob;
    disc.dt = dt;
    disc.m_history = m;
    disc.n_steps = static_cast<std::size_t>(std::llround(prob.horizon / dt));

    SpaceTag tag;
    switch (prob.backend) {
        case Backend::Transport:
            disc.grid = SpatialGrid::unit_interval(n_space);
            disc.sg = std::make_shared<TransportSemigroup>(disc.grid, prob.mu_decay);
            tag = SpaceTag::C0;
            break;
        case Backend::McKendrick: {
            disc.grid = SpatialGrid::half_line(n_space, prob.trunc_length);
            GridFunction mu(disc.grid, SpaceTag::L1), b(disc.grid, SpaceTag::L1);
            for (std::size_t i = 0; i < n_space; ++i) {
                mu.values[i] = prob.mu_fn(disc.grid->nodes[i]);
                b.values[i] = prob.b_fn(disc.grid->nodes[i]);
            }
            disc.sg = std::make_shared<McKendrickSemigroup>(
                disc.grid, std::move(mu), std::move(b), prob.w,
                prob.horizon + 1.0, prob.renewal);
            tag = SpaceTag::L1;
            break;
        }
        case Backend::FiniteDim:
            disc.grid = SpatialGrid::unit_interval(prob.matrix.size() >= 2
                                                       ? prob.matrix.size()
                                                       : 2);
            disc.sg = std::make_shared<FiniteDimSemigroup>(prob.matrix);
            tag = SpaceTag::Euclidean;
            break;
        default:
            throw std::logic_error("unknown backend");
    }
    const std::size_t n = prob.backend == Backend::FiniteDim
                              ? prob.matrix.size()
                              : n_space;
    auto coord = [&](std::size_t i) {
        return prob.backend == Backend::FiniteDim
                   ? static_cast<double>(i)
                   : disc.grid->nodes[i];
    };

    auto make_fn = [&](const std::function<double(double)>& f) {
        GridFunction g;
        g.grid = disc.grid;
        g.tag = tag;
        g.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) g.values[i] = f ? f(coord(i)) : 0.0;
        return g;
    };
    disc.x0 = make_fn(prob.x0_fn);
    if (tag == SpaceTag::C0) disc.x0.values[0] = 0.0;

    disc.psi.reserve(prob.noise_dim);
    for (std::size_t c = 0; c < prob.noise_dim; ++c) {
        GridFunction col;
        col.grid = disc.grid;
        col.tag = tag;
        col.values.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            col.values[i] = prob.psi_fn ? prob.psi_fn(coord(i), c) : 0.0;
        if (tag == SpaceTag::C0) col.values[0] = 0.0;
        disc.psi.push_back(std::move(col));
    }

    disc.f0.p = prob.p;
    disc.f0.frames.reserve(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double theta = -1.0 + dt * static_cast<double>(j);
        GridFunction g;
        g.grid = disc.grid;
        g.tag = tag;
        g.values.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.values[i] = prob.f0_fn ? prob.f0_fn(theta, coord(i)) : 0.0;
        if (tag == SpaceTag::C0) g.values[0] = 0.0;
        disc.f0.frames.push_back(std::move(g));
    }

    auto make_tab = [&](const std::function<double(double, double)>& ker) {
        std::vector<std::vector<double>> tab;
        if (!ker) return tab;
        tab.resize(m + 1);
        for (std::size_t j = 0; j <= m; ++j) {
            const double theta = -1.0 + dt * static_cast<double>(j);
            tab[j].resize(n);
            for (std::size_t i = 0; i < n; ++i) tab[j][i] = ker(theta, coord(i));
        }
        return tab;
    };
    disc.phi_tab = make_tab(prob.phi_kernel);
    disc.k_tab = make_tab(prob.k_kernel);
    return disc;
}

GridFunction drift_phi(const Discretization& disc, const GridFunction& x,
                       const SegmentFunction& seg) {
    const std::size_t n = x.values.size();
    if (seg.frames.size() != disc.m_history + 1 ||
        seg.frames.front().values.size() != n)
        throw std::invalid_argument("kernel/grid mismatch in drift evaluation");
    const auto& prob = *disc.problem;
    GridFunction out = x;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    const std::size_t m = disc.m_history;
    const double dth = disc.dt;
    // trapezoid in theta for both kernel integrals
    for (std::size_t j = 0; j <= m; ++j) {
        const double wj = (j == 0 || j == m) ? 0.5 * dth : dth;
        const auto& h = seg.frames[j].values;
        if (!disc.phi_tab.empty()) {
            const auto& row = disc.phi_tab[j];
            for (std::size_t i = 0; i < n; ++i) out.values[i] += wj * row[i] * h[i];
        }
        if (!disc.k_tab.empty() && prob.f2.kind != ScalarMap::Kind::Zero) {
            const auto& row = disc.k_tab[j];
            for (std::size_t i = 0; i < n; ++i)
                out.values[i] += wj * row[i] * prob.f2(h[i]);
        }
    }
    if (prob.f1.kind != ScalarMap::Kind::Zero)
        for (std::size_t i = 0; i < n; ++i) out.values[i] += prob.f1(x.values[i]);
    return out;
}

double kernel_mixed_norm(const Discretization& disc,
                         const std::vector<std::vector<double>>& tab, double p) {
    if (tab.empty()) return 0.0;
    const std::size_t m = disc.m_history;
    const std::size_t n = tab.front().size();
    double best = 0.0;
    if (p == 1.0) {
        // p' = inf: ess-sup over theta, realized as grid max
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= m; ++j) s = std::max(s, std::abs(tab[j][i]));
            best = std::max(best, s);
        }
    } else {
        const double pp = p / (p - 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> col(m + 1);
            for (std::size_t j = 0; j <= m; ++j)
                col[j] = std::pow(std::abs(tab[j][i]), pp);
            best = std::max(best, std::pow(trapezoid(col, disc.dt), 1.0 / pp));
        }
    }
    return best;
}

double lipschitz_constant(const Discretization& disc) {
    const auto& prob = *disc.problem;
    const double k_norm = kernel_mixed_norm(disc, disc.k_tab, prob.p);
    const double phi_norm = kernel_mixed_norm(disc, disc.phi_tab, prob.p);
    const double inner =
        std::max(prob.f1.lipschitz(), prob.f2.lipschitz() * k_norm + phi_norm);
    return std::pow(2.0, 1.0 / prob.p) * inner;
}

DelayProblem transport_scenario() {
    DelayProblem prob;
    prob.backend = Backend::Transport;
    prob.mu_decay = 0.4;
    prob.phi_kernel = [](double theta, double xi) {
        return 0.5 * std::exp(theta) * (0.5 + 0.5 * xi);
    };
    prob.k_kernel = [](double theta, double xi) {
        return 0.4 * (1.0 + theta) * (1.0 - 0.5 * xi);
    };
    prob.f1 = {ScalarMap::Kind::Sin, 0.5};
    prob.f2 = {ScalarMap::Kind::Tanh, 0.5};
    prob.psi_fn = [](double xi, std::size_t) { return std::sin(std::numbers::pi * xi); };
    prob.x0_fn = [](double xi) { return 0.5 * std::sin(std::numbers::pi * xi); };
    prob.f0_fn = [](double theta, double xi) {
        return std::cos(0.5 * std::numbers::pi * theta) * xi * (1.0 - xi);
    };
    return prob;
}

DelayProblem mckendrick_scenario() {
    DelayProblem prob;
    prob.backend = Backend::McKendrick;
    prob.trunc_length = 10.0;
    prob.mu_fn = [](double a) { return 0.3 + 0.1 / (1.0 + a); };
    prob.b_fn = [](double a) { return 0.8 * std::exp(-0.5 * a); };
    prob.w = 1.5;
    prob.sigma_support = 1.0;
    prob.phi_kernel = [](double theta, double a) {
        return 0.3 * std::exp(theta) * std::exp(-0.2 * a);
    };
    prob.k_kernel = [](double theta, double a) {
        return 0.25 * (1.0 + theta) * std::exp(-0.3 * a);
    };
    prob.f1 = {ScalarMap::Kind::Sin, 0.3};
    prob.f2 = {ScalarMap::Kind::Tanh, 0.3};
    prob.psi_fn = [](double a, std::size_t) {
        return a < 1.0 ? 4.0 * a * (1.0 - a) : 0.0;  // sigma, supp in [0,d]
    };
    prob.x0_fn = [](double a) { return std::exp(-a); };
    prob.f0_fn = [](double theta, double a) {
        return (1.0 + 0.2 * theta) * std::exp(-a);
    };
    return prob;
}

DelayProblem finite_dim_scenario(std::size_t n) {
    DelayProblem prob;
    prob.backend = Backend::FiniteDim;
    prob.matrix.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) prob.matrix[i][i] = -1.0;
    prob.f1 = {ScalarMap::Kind::Linear, 0.5};
    prob.psi_fn = [](double, std::size_t) { return 1.0; };
    prob.x0_fn = [](double) { return 1.0; };
    prob.f0_fn = [](double, double) { return 1.0; };
    return prob;
}

}  // namespace sdelay
