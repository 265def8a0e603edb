// SPDX-License-Identifier: Apache-2.0
#include "sdelay/solver.hpp"

#include <cmath>

namespace sdelay {

namespace {

// drift at a trajectory node without materializing the segment
GridFunction drift_at(const Discretization& disc,
                      const std::vector<GridFunction>& states,
                      const std::vector<GridFunction>& tail_override,
                      std::size_t node) {
    const auto& prob = *disc.problem;
    const std::size_t m = disc.m_history;
    const std::size_t n = states[node].values.size();
    GridFunction out = states[node];
    std::fill(out.values.begin(), out.values.end(), 0.0);
    const double dth = disc.dt;
    for (std::size_t j = 0; j <= m; ++j) {
        const long long kk =
            static_cast<long long>(node) - static_cast<long long>(m) +
            static_cast<long long>(j);
        const std::vector<double>* h;
        if (kk < 0)
            h = &disc.f0.frames[static_cast<std::size_t>(kk + static_cast<long long>(m))]
                     .values;
        else if (!tail_override.empty() && kk != static_cast<long long>(node))
            h = &tail_override[static_cast<std::size_t>(kk)].values;
        else
            h = &states[static_cast<std::size_t>(kk)].values;
        const double wj = (j == 0 || j == m) ? 0.5 * dth : dth;
        if (!disc.phi_tab.empty()) {
            const auto& row = disc.phi_tab[j];
            for (std::size_t i = 0; i < n; ++i) out.values[i] += wj * row[i] * (*h)[i];
        }
        if (!disc.k_tab.empty() && prob.f2.kind != ScalarMap::Kind::Zero) {
            const auto& row = disc.k_tab[j];
            for (std::size_t i = 0; i < n; ++i)
                out.values[i] += wj * row[i] * prob.f2((*h)[i]);
        }
    }
    if (prob.f1.kind != ScalarMap::Kind::Zero) {
        const auto& x = states[node].values;
        for (std::size_t i = 0; i < n; ++i) out.values[i] += prob.f1(x[i]);
    }
    return out;
}

void check_path(const Discretization& disc, const NoisePath& path) {
    if (std::abs(path.dt - disc.dt) > 1e-12)
        throw std::invalid_argument("path step does not match the discretization");
    if (path.n_steps() < disc.n_steps)
        throw std::invalid_argument("path does not cover the horizon");
    if (path.d != disc.psi.size())
        throw std::invalid_argument("path dimension does not match psi");
}

}  // namespace

PicardResult picard_solve(const Discretization& disc, const NoisePath& path,
                          const PicardConfig& cfg) {
    check_path(disc, path);
    const std::size_t N = disc.n_steps;
    const double dt = disc.dt;
    const auto& sg = *disc.sg;

    std::vector<GridFunction> free_ev(N + 1);
    for (std::size_t k = 0; k <= N; ++k)
        free_ev[k] = sg.apply(dt * static_cast<double>(k), disc.x0);
    const auto conv = stochastic_convolution_path(sg, disc.psi, path);

    PicardResult res;
    const double L = lipschitz_constant(disc);
    res.beta_used = cfg.beta > 0.0 ? cfg.beta : std::max(1.0, 2.0 * L);

    std::vector<GridFunction> Z = free_ev;
    const bool drift_active = !disc.phi_tab.empty() || !disc.k_tab.empty() ||
                              disc.problem->f1.kind != ScalarMap::Kind::Zero;
    const std::vector<GridFunction> no_override;

    double prev_dist = -1.0;
    std::size_t bad_streak = 0;
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        std::vector<GridFunction> phi;
        if (drift_active) {
            phi.reserve(N + 1);
            for (std::size_t i = 0; i <= N; ++i)
                phi.push_back(drift_at(disc, Z, no_override, i));
        }
        std::vector<GridFunction> Znew(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            GridFunction acc = free_ev[n];
            acc += conv[n];
            for (std::size_t i = 0; i < n && drift_active; ++i) {
                GridFunction term = sg.apply(dt * static_cast<double>(n - i), phi[i]);
                term *= dt;
                acc += term;
            }
            Znew[n] = std::move(acc);
        }
        double dist = 0.0;
        for (std::size_t n = 0; n <= N; ++n) dist = std::max(dist, norm_E(Znew[n] - Z[n]));
        Z = std::move(Znew);
        res.iterations = it + 1;
        res.final_distance = dist;
        if (prev_dist > 0.0) {
            const double ratio = dist / prev_dist;
            res.contraction_estimate = std::max(res.contraction_estimate, ratio);
            bad_streak = ratio >= 1.0 ? bad_streak + 1 : 0;
            if (bad_streak >= 3 && dist > cfg.tol)
                throw std::runtime_error("Picard iteration is not contracting");
        }
        prev_dist = dist;
        if (dist < cfg.tol) {
            res.traj.dt = dt;
            res.traj.states = std::move(Z);
            return res;
        }
    }
    throw std::runtime_error("Picard iteration exceeded max_iter");
}

GridFunction mild_evaluate(const Discretization& disc, const Trajectory& traj,
                           const NoisePath& path, double t, BochnerRule rule) {
    check_path(disc, path);
    const std::size_t k = traj.index_of(t);
    const auto& sg = *disc.sg;
    GridFunction out = sg.apply(t, disc.x0);
    out += stochastic_convolution(sg, disc.psi, path, t);
    const bool drift_active = !disc.phi_tab.empty() || !disc.k_tab.empty() ||
                              disc.problem->f1.kind != ScalarMap::Kind::Zero;
    if (!drift_active || k == 0) return out;
    const std::vector<GridFunction> no_override;
    const double dt = disc.dt;
    const std::size_t top = rule == BochnerRule::LeftPoint ? k - 1 : k;
    for (std::size_t i = 0; i <= top; ++i) {
        GridFunction phi = drift_at(disc, traj.states, no_override, i);
        GridFunction term = sg.apply(dt * static_cast<double>(k - i), phi);
        double w = dt;
        if (rule == BochnerRule::Trapezoid && (i == 0 || i == k)) w = 0.5 * dt;
        term *= w;
        out += term;
    }
    return out;
}

LiftedState LiftResult::state_at(std::size_t n) const {
    LiftedState y;
    y.head = heads.states[n];
    const std::size_t m = f0.m_history();
    y.tail.p = f0.p;
    y.tail.frames.reserve(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const long long kk = static_cast<long long>(n) - static_cast<long long>(m) +
                             static_cast<long long>(j);
        if (kk < 0)
            y.tail.frames.push_back(
                f0.frames[static_cast<std::size_t>(kk + static_cast<long long>(m))]);
        else if (kk == static_cast<long long>(n))
            y.tail.frames.push_back(y.head);
        else
            y.tail.frames.push_back(tailbase[static_cast<std::size_t>(kk)]);
    }
    return y;
}

LiftResult markov_lift_solve(const Discretization& disc, const NoisePath& path,
                             const PicardConfig& cfg) {
    check_path(disc, path);
    const std::size_t N = disc.n_steps;
    const double dt = disc.dt;
    const auto& sg = *disc.sg;

    std::vector<GridFunction> free_ev(N + 1);
    for (std::size_t k = 0; k <= N; ++k)
        free_ev[k] = sg.apply(dt * static_cast<double>(k), disc.x0);
    const auto conv = stochastic_convolution_path(sg, disc.psi, path);

    LiftResult res;
    res.f0 = disc.f0;
    const bool drift_active = !disc.phi_tab.empty() || !disc.k_tab.empty() ||
                              disc.problem->f1.kind != ScalarMap::Kind::Zero;

    std::vector<GridFunction> head = free_ev;
    std::vector<GridFunction> tb = free_ev;  // free lift: tails read S(t_k)x0
    double prev_dist = -1.0;
    std::size_t bad_streak = 0;
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        std::vector<GridFunction> phi(N + 1);
        if (drift_active)
            for (std::size_t i = 0; i <= N; ++i) phi[i] = drift_at(disc, head, tb, i);
        std::vector<GridFunction> head_new(N + 1), tb_new(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            GridFunction acc = free_ev[n];
            acc += conv[n];
            if (drift_active) {
                // left-point Bochner rule, matching the direct solver; the
                // lift-vs-direct gap is then the tail-representation error
                for (std::size_t i = 0; i < n; ++i) {
                    GridFunction term =
                        sg.apply(dt * static_cast<double>(n - i), phi[i]);
                    term *= dt;
                    acc += term;
                }
            }
            head_new[n] = std::move(acc);
        }
        for (std::size_t k = 0; k <= N; ++k) {
            tb_new[k] = head_new[k];
            if (drift_active) {
                GridFunction half = phi[k];
                half *= 0.5 * dt;
                tb_new[k] += half;  // tail reads carry the full endpoint weight
            }
        }
        double dist = 0.0;
        for (std::size_t n = 0; n <= N; ++n) {
            dist = std::max(dist, norm_E(head_new[n] - head[n]));
            dist = std::max(dist, norm_E(tb_new[n] - tb[n]));
        }
        head = std::move(head_new);
        tb = std::move(tb_new);
        res.iterations = it + 1;
        res.final_distance = dist;
        if (prev_dist > 0.0) {
            bad_streak = dist >= prev_dist ? bad_streak + 1 : 0;
            if (bad_streak >= 3 && dist > cfg.tol)
                throw std::runtime_error("lifted Picard iteration is not contracting");
        }
        prev_dist = dist;
        if (dist < cfg.tol) {
            res.heads.dt = dt;
            res.heads.states = std::move(head);
            res.tailbase = std::move(tb);
            return res;
        }
    }
    throw std::runtime_error("lifted Picard iteration exceeded max_iter");
}

}  // namespace sdelay
