// SPDX-License-Identifier: Apache-2.0
#include "sdelay/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "sdelay/parallel.hpp"

namespace sdelay {

namespace {

// trapezoid weights of the pairing <x, rho> = x^T D rho
std::vector<double> pairing_weights(const GridFunction& x) {
    const std::size_t n = x.values.size();
    std::vector<double> d(n, 1.0);
    if (x.tag != SpaceTag::Euclidean) {
        const double h = x.grid->spacing();
        for (auto& v : d) v = h;
        d.front() *= 0.5;
        d.back() *= 0.5;
    }
    return d;
}

double bump(double z) {
    const double z2 = z * z;
    return z2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z2)) : 0.0;
}

}  // namespace

double pair_functional(const GridFunction& x, const GridFunction& density) {
    if (x.values.size() != density.values.size())
        throw std::invalid_argument("functional/state grid mismatch");
    const auto d = pairing_weights(x);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        s += d[i] * x.values[i] * density.values[i];
    return s;
}

std::vector<std::vector<double>> generator_matrix(const Discretization& disc) {
    const auto& prob = *disc.problem;
    if (prob.backend == Backend::FiniteDim) return prob.matrix;

    const std::size_t n = disc.grid->n_points;
    const double h = disc.grid->spacing();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    auto mu_at = [&](std::size_t i) {
        return prob.backend == Backend::Transport ? prob.mu_decay
                                                  : prob.mu_fn(disc.grid->nodes[i]);
    };
    for (std::size_t i = 1; i < n; ++i) {
        a[i][i] = -1.0 / h - mu_at(i);
        a[i][i - 1] = 1.0 / h;
    }
    if (prob.backend == Backend::McKendrick) {
        // age-zero row: forward difference of -d/da - mu; the nonlocal birth
        // condition is monitored separately as a boundary defect
        a[0][0] = 1.0 / h - mu_at(0);
        a[0][1] = -1.0 / h;
    }
    // transport keeps the zero row: the C0 constraint pins X(s, 0) = 0
    return a;
}

GridFunction apply_matrix(const std::vector<std::vector<double>>& a,
                          const GridFunction& x) {
    if (a.size() != x.values.size())
        throw std::invalid_argument("matrix/state size mismatch");
    GridFunction out = x;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        const auto& row = a[i];
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0.0) s += row[j] * x.values[j];
        out.values[i] = s;
    }
    return out;
}

TestFunctional make_functional(const Discretization& disc, std::string id,
                               GridFunction density) {
    const auto a = generator_matrix(disc);
    const auto d = pairing_weights(density);
    TestFunctional f;
    f.id = std::move(id);
    f.adjoint_action = density;
    // a_i = (1/d_i) sum_j A_{ji} d_j rho_j, so that <A x, rho>_D = <x, a>_D
    for (std::size_t i = 0; i < d.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (a[j][i] != 0.0) s += a[j][i] * d[j] * density.values[j];
        f.adjoint_action.values[i] = s / d[i];
    }
    f.density = std::move(density);
    return f;
}

std::vector<TestFunctional> functional_suite(const Discretization& disc,
                                             std::size_t n_random,
                                             std::uint64_t seed) {
    std::vector<TestFunctional> suite;
    const auto& grid = *disc.grid;
    const bool euclid = disc.x0.tag == SpaceTag::Euclidean;
    if (euclid) {
        const std::size_t n = disc.x0.values.size();
        for (std::size_t i = 0; i < std::min<std::size_t>(n, 10); ++i) {
            GridFunction e = disc.x0;
            std::fill(e.values.begin(), e.values.end(), 0.0);
            e.values[i] = 1.0;
            suite.push_back(make_functional(disc, "basis_" + std::to_string(i), e));
        }
    } else {
        // fixed compact bumps spread across the active part of the domain
        const double span = std::min(grid.truncation_length, 4.0);
        const double centers[5] = {0.2, 0.35, 0.5, 0.65, 0.8};
        const double widths[2] = {0.12, 0.18};
        int id = 0;
        for (double w : widths) {
            for (double c : centers) {
                GridFunction rho = disc.x0;
                std::fill(rho.values.begin(), rho.values.end(), 0.0);
                for (std::size_t i = 0; i < grid.n_points; ++i)
                    rho.values[i] = bump((grid.nodes[i] - c * span) / (w * span));
                suite.push_back(
                    make_functional(disc, "bump_" + std::to_string(id++), rho));
            }
        }
    }
    const CounterRng rng{derive_stream(seed, 0x66756e63ull)};
    std::uint64_t ctr = 0;
    for (std::size_t r = 0; r < n_random; ++r) {
        GridFunction rho = disc.x0;
        std::fill(rho.values.begin(), rho.values.end(), 0.0);
        if (euclid) {
            for (auto& v : rho.values) v = rng.gaussian(ctr++);
        } else {
            const double span = std::min(grid.truncation_length, 4.0);
            const double a1 = rng.gaussian(ctr++), a2 = rng.gaussian(ctr++),
                         a3 = rng.gaussian(ctr++);
            for (std::size_t i = 0; i < grid.n_points; ++i) {
                const double u = grid.nodes[i] / span;
                if (u >= 1.0) continue;
                const double pi = 3.14159265358979323846;
                rho.values[i] = (a1 * std::sin(pi * u) + a2 * std::sin(2 * pi * u) +
                                 a3 * std::sin(3 * pi * u)) *
                                bump(2.0 * u - 1.0);
            }
        }
        suite.push_back(make_functional(disc, "random_" + std::to_string(r), rho));
    }
    return suite;
}

double weak_residual(const Discretization& disc, const Trajectory& traj,
                     const NoisePath& path, const TestFunctional& f, double t) {
    if (f.adjoint_action.values.empty())
        throw std::invalid_argument("functional lacks its adjoint action");
    const std::size_t k = traj.index_of(t);
    const double dt = traj.dt;
    const auto& prob = *disc.problem;

    const double lhs =
        pair_functional(traj.states[k], f.density) - pair_functional(disc.x0, f.density);

    // trapezoid in time for both Lebesgue integrals
    double gen_int = 0.0, drift_int = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double w = (i == 0 || i == k) ? 0.5 * dt : dt;
        gen_int += w * pair_functional(traj.states[i], f.adjoint_action);
        auto seg = segment_extract(traj, disc.f0, dt * static_cast<double>(i), prob.p);
        auto phi = drift_phi(disc, traj.states[i], seg);
        drift_int += w * pair_functional(phi, f.density);
    }
    double noise = 0.0;
    for (std::size_t c = 0; c < disc.psi.size(); ++c)
        noise += pair_functional(disc.psi[c], f.density) * path.level(k, c);

    return std::abs(lhs - gen_int - drift_int - noise);
}

double mild_residual(const Discretization& disc, const Trajectory& traj,
                     const NoisePath& path, double t) {
    const std::size_t k = traj.index_of(t);
    auto rhs = mild_evaluate(disc, traj, path, t, BochnerRule::Trapezoid);
    return norm_E(traj.states[k] - rhs);
}

StrongResidual strong_residual(const Discretization& disc, const Trajectory& traj,
                               const NoisePath& path, double t) {
    const std::size_t k = traj.index_of(t);
    const double dt = traj.dt;
    const auto& prob = *disc.problem;

    GridFunction time_int = disc.x0;
    std::fill(time_int.values.begin(), time_int.values.end(), 0.0);
    GridFunction drift_int = time_int;
    for (std::size_t i = 0; i <= k; ++i) {
        const double w = (i == 0 || i == k) ? 0.5 * dt : dt;
        GridFunction term = traj.states[i];
        term *= w;
        time_int += term;
        auto seg = segment_extract(traj, disc.f0, dt * static_cast<double>(i), prob.p);
        auto phi = drift_phi(disc, traj.states[i], seg);
        phi *= w;
        drift_int += phi;
    }

    StrongResidual res;
    if (prob.backend == Backend::McKendrick) {
        // the generalized strong identity needs int X in D(A): monitor the
        // nonlocal birth-law defect of the time integral
        const double h = disc.grid->spacing();
        double birth = 0.0;
        for (std::size_t i = 0; i < disc.grid->n_points; ++i) {
            const double w = (i == 0 || i + 1 == disc.grid->n_points) ? 0.5 * h : h;
            birth += w * prob.b_fn(disc.grid->nodes[i]) * time_int.values[i];
        }
        const double scale = std::max(norm_E(time_int), 1e-30);
        res.boundary_defect = std::abs(time_int.values[0] - birth) / scale;
        if (res.boundary_defect > 0.05) {
            res.skipped = true;
            return res;
        }
    }

    const auto a = generator_matrix(disc);
    GridFunction out = traj.states[k];
    out -= disc.x0;
    out -= apply_matrix(a, time_int);
    out -= drift_int;
    for (std::size_t c = 0; c < disc.psi.size(); ++c) {
        GridFunction w = disc.psi[c];
        w *= path.level(k, c);
        out -= w;
    }
    res.value = norm_E(out);
    return res;
}

EquivalenceReport equivalence_report(const DelayProblem& prob, const VerifyConfig& cfg,
                                     const DelayProblem* residual_prob) {
    if (cfg.levels < 2) throw std::invalid_argument("need at least 2 refinement levels");
    EquivalenceReport rep;
    rep.tol = cfg.picard.tol;
    rep.seed = cfg.seed;

    // bridge-consistent noise: one coarse draw, refined per level
    std::vector<NoisePath> paths;
    const auto n0 = static_cast<std::size_t>(std::llround(prob.horizon / cfg.dt0));
    paths.push_back(sample_path(n0, cfg.dt0, prob.noise_dim, cfg.seed));
    for (std::size_t l = 1; l < cfg.levels; ++l)
        paths.push_back(bridge_refine(paths.back(), l));

    rep.levels.resize(cfg.levels);
    parallel_for(cfg.levels, cfg.n_threads, [&](std::size_t l) {
        const double dt = cfg.dt0 / static_cast<double>(std::size_t{1} << l);
        // refine space together with time so the upwind generator error
        // shrinks in lockstep
        const std::size_t n_space = (cfg.n_space - 1) * (std::size_t{1} << l) + 1;
        auto disc = discretize(prob, dt, n_space);
        auto sol = picard_solve(disc, paths[l], cfg.picard);
        auto rdisc =
            residual_prob ? discretize(*residual_prob, dt, n_space) : std::move(disc);

        LevelReport& lr = rep.levels[l];
        lr.dt = dt;
        lr.dxi = rdisc.grid->spacing();
        const double T = prob.horizon;
        lr.mild = mild_residual(rdisc, sol.traj, paths[l], T);
        auto sr = strong_residual(rdisc, sol.traj, paths[l], T);
        lr.strong = sr.value;
        lr.strong_skipped = sr.skipped;
        auto suite = functional_suite(rdisc, cfg.n_random_functionals, cfg.seed);
        for (const auto& f : suite) {
            const double r = weak_residual(rdisc, sol.traj, paths[l], f, T);
            lr.weak.emplace_back(f.id, r);
            lr.weak_max = std::max(lr.weak_max, r);
        }
    });

    auto order = [](double coarse, double fine) {
        return std::log2(std::max(coarse, 1e-300) / std::max(fine, 1e-300));
    };
    rep.monotone = true;
    for (std::size_t l = 0; l + 1 < cfg.levels; ++l) {
        const auto& c = rep.levels[l];
        const auto& f = rep.levels[l + 1];
        rep.weak_orders.push_back(order(c.weak_max, f.weak_max));
        rep.mild_orders.push_back(order(c.mild, f.mild));
        rep.strong_orders.push_back(order(c.strong, f.strong));
        if (f.weak_max >= c.weak_max || f.mild >= c.mild) rep.monotone = false;
        if (!c.strong_skipped && !f.strong_skipped && f.strong >= c.strong)
            rep.monotone = false;
    }
    for (const auto& lv : rep.levels) {
        std::vector<double> rs{lv.weak_max, lv.mild};
        if (!lv.strong_skipped) rs.push_back(lv.strong);
        const double lo = *std::min_element(rs.begin(), rs.end());
        const double hi = *std::max_element(rs.begin(), rs.end());
        if (lo < 10.0 * rep.tol && hi > 100.0 * rep.tol) rep.divergence_pair = true;
    }
    return rep;
}

CovarianceReport covariance_oracle_check(const DelayProblem& prob, double dt,
                                         std::size_t n_space, double t,
                                         std::size_t n_mc,
                                         const std::vector<std::size_t>& probes,
                                         std::uint64_t seed, std::size_t n_threads) {
    if (prob.phi_kernel || prob.k_kernel ||
        prob.f1.kind != ScalarMap::Kind::Zero || prob.f2.kind != ScalarMap::Kind::Zero)
        throw std::invalid_argument("covariance oracle requires F = 0");
    auto disc = discretize(prob, dt, n_space);
    const auto k = static_cast<std::size_t>(std::llround(t / dt));
    if (k > disc.n_steps) throw std::invalid_argument("t beyond the horizon");

    // S(j dt) psi_c once, restricted to probe nodes
    const std::size_t np = probes.size(), d = disc.psi.size();
    std::vector<std::vector<double>> sp(k + 1, std::vector<double>(d * np));
    for (std::size_t j = 0; j <= k; ++j)
        for (std::size_t c = 0; c < d; ++c) {
            auto g = disc.sg->apply(dt * static_cast<double>(j), disc.psi[c]);
            for (std::size_t q = 0; q < np; ++q) sp[j][c * np + q] = g.values[probes[q]];
        }

    // Ito isometry: Var X(t)(xi) = sum_i sum_c (S(t - t_i) psi_c)(xi)^2 dt
    std::vector<double> oracle(np, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t q = 0; q < np; ++q) {
                const double v = sp[k - i][c * np + q];
                oracle[q] += v * v * dt;
            }

    std::vector<std::vector<double>> samples(n_mc, std::vector<double>(np));
    parallel_for(n_mc, n_threads, [&](std::size_t m) {
        const CounterRng rng{derive_stream(seed, m)};
        const double sd = std::sqrt(dt);
        std::vector<double> acc(np, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                const double dw = sd * rng.gaussian(i * d + c);
                for (std::size_t q = 0; q < np; ++q)
                    acc[q] += sp[k - i][c * np + q] * dw;
            }
        samples[m] = std::move(acc);
    });

    CovarianceReport rep;
    for (std::size_t q = 0; q < np; ++q) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t m = 0; m < n_mc; ++m) {
            m1 += samples[m][q];
            m2 += samples[m][q] * samples[m][q];
        }
        m1 /= static_cast<double>(n_mc);
        m2 /= static_cast<double>(n_mc);
        CovarianceProbe p;
        p.node = probes[q];
        p.mc_variance = m2 - m1 * m1;
        p.oracle = oracle[q];
        p.std_error = std::max(p.oracle, 1e-300) *
                      std::sqrt(2.0 / static_cast<double>(n_mc - 1));
        p.z = (p.mc_variance - p.oracle) / p.std_error;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(p.z));
        rep.probes.push_back(p);
    }
    return rep;
}

}  // namespace sdelay
