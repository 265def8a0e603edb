// SPDX-License-Identifier: Apache-2.0
#include "sdelay/noise.hpp"

#include <cmath>
#include <numbers>

namespace sdelay {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
    const std::uint64_t h = mix(seed ^ mix(counter ^ 0x5851f42d4c957f2dull));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t member) {
    return CounterRng::mix(seed ^ CounterRng::mix(member + 0x632be59bd9b4e019ull));
}

double NoisePath::level(std::size_t k, std::size_t c) const {
    double w = 0.0;
    for (std::size_t i = 0; i < k; ++i) w += dW(i, c);
    return w;
}

NoisePath sample_path(std::size_t n_steps, double dt, std::size_t d,
                      std::uint64_t seed) {
    if (n_steps < 1 || dt <= 0.0 || d < 1)
        throw std::invalid_argument("need n_steps >= 1, dt > 0, d >= 1");
    NoisePath p;
    p.dt = dt;
    p.d = d;
    p.seed = seed;
    p.increments.resize(n_steps * d);
    const CounterRng rng{seed};
    const double s = std::sqrt(dt);
    for (std::size_t i = 0; i < p.increments.size(); ++i)
        p.increments[i] = s * rng.gaussian(i);
    return p;
}

NoisePath bridge_refine(const NoisePath& coarse, std::uint64_t level_tag) {
    NoisePath fine;
    fine.dt = 0.5 * coarse.dt;
    fine.d = coarse.d;
    fine.seed = coarse.seed;
    fine.increments.resize(2 * coarse.increments.size());
    const CounterRng rng{CounterRng::mix(coarse.seed ^ CounterRng::mix(level_tag))};
    const double half_sd = 0.5 * std::sqrt(coarse.dt);
    const std::size_t n = coarse.n_steps();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < coarse.d; ++c) {
            const double dw = coarse.dW(i, c);
            const double z = half_sd * rng.gaussian(i * coarse.d + c);
            fine.increments[(2 * i) * fine.d + c] = 0.5 * dw + z;
            fine.increments[(2 * i + 1) * fine.d + c] = 0.5 * dw - z;
        }
    }
    return fine;
}

GridFunction stochastic_convolution(const Semigroup& sg,
                                    const std::vector<GridFunction>& psi,
                                    const NoisePath& path, double t) {
    if (psi.size() != path.d) throw std::invalid_argument("psi columns != path dim");
    const double k_real = t / path.dt;
    const auto k = static_cast<std::size_t>(std::llround(k_real));
    if (std::abs(k_real - static_cast<double>(k)) > 1e-9 || k > path.n_steps())
        throw std::invalid_argument("t not on the path grid");
    GridFunction out = psi[0];
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double s = t - path.dt * static_cast<double>(i);
        for (std::size_t c = 0; c < path.d; ++c) {
            const GridFunction sp = sg.apply(s, psi[c]);
            const double dw = path.dW(i, c);
            for (std::size_t q = 0; q < out.values.size(); ++q)
                out.values[q] += sp.values[q] * dw;
        }
    }
    return out;
}

std::vector<GridFunction> stochastic_convolution_path(
    const Semigroup& sg, const std::vector<GridFunction>& psi, const NoisePath& path) {
    if (psi.size() != path.d) throw std::invalid_argument("psi columns != path dim");
    const std::size_t n = path.n_steps();
    // S(j dt) psi_c, shared across all target times
    std::vector<std::vector<GridFunction>> spsi(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        spsi[j].reserve(path.d);
        for (std::size_t c = 0; c < path.d; ++c)
            spsi[j].push_back(sg.apply(path.dt * static_cast<double>(j), psi[c]));
    }
    std::vector<GridFunction> conv(n + 1, psi[0]);
    for (auto& g : conv) std::fill(g.values.begin(), g.values.end(), 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        auto& out = conv[k].values;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t c = 0; c < path.d; ++c) {
                const auto& sp = spsi[k - i][c].values;
                const double dw = path.dW(i, c);
                for (std::size_t q = 0; q < out.size(); ++q) out[q] += sp[q] * dw;
            }
        }
    }
    return conv;
}

// --------------------------------------------------------------------- Haar

HaarBasis haar_basis(std::size_t depth, double t_len) {
    if (t_len <= 0.0) throw std::invalid_argument("t_len must be positive");
    HaarBasis basis;
    basis.t_len = t_len;
    basis.n_cells = std::size_t{1} << depth;
    const double scale = 1.0 / std::sqrt(t_len);
    basis.funcs.emplace_back(basis.n_cells, scale);  // h_0
    for (std::size_t n = 1; n <= depth; ++n) {
        const std::size_t per = std::size_t{1} << (n - 1);       // wavelets at level n
        const std::size_t width = basis.n_cells / (per * 2);     // cells per half-support
        const double amp = scale * std::pow(2.0, 0.5 * static_cast<double>(n - 1));
        for (std::size_t j = 0; j < per; ++j) {
            std::vector<double> f(basis.n_cells, 0.0);
            const std::size_t start = 2 * j * width;
            for (std::size_t c = 0; c < width; ++c) {
                f[start + c] = amp;
                f[start + width + c] = -amp;
            }
            basis.funcs.push_back(std::move(f));
        }
    }
    return basis;
}

double HaarBasis::inner(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) s += funcs[i][c] * funcs[j][c];
    return s * cell_width();
}

// --------------------------------------------------------------- gamma norm

std::vector<GridFunction> kernel_images(const KernelOperator& R, const HaarBasis& basis) {
    const std::size_t cells = basis.n_cells;
    const double du = basis.cell_width();
    std::vector<std::vector<GridFunction>> cellint(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const double u = du * (static_cast<double>(c) + 0.5);
        cellint[c].reserve(R.d);
        for (std::size_t h = 0; h < R.d; ++h) {
            GridFunction g = R.column(u, h);
            g *= du;
            cellint[c].push_back(std::move(g));
        }
    }
    std::vector<GridFunction> images;
    images.reserve(basis.funcs.size() * R.d);
    for (const auto& f : basis.funcs) {
        for (std::size_t h = 0; h < R.d; ++h) {
            GridFunction img = cellint[0][h];
            std::fill(img.values.begin(), img.values.end(), 0.0);
            for (std::size_t c = 0; c < cells; ++c) {
                if (f[c] == 0.0) continue;
                const auto& src = cellint[c][h].values;
                for (std::size_t q = 0; q < img.values.size(); ++q)
                    img.values[q] += f[c] * src[q];
            }
            images.push_back(std::move(img));
        }
    }
    return images;
}

double GammaEstimate::norm() const { return std::sqrt(std::max(second_moment, 0.0)); }

GammaEstimate gamma_second_moment(const std::vector<GridFunction>& images,
                                  std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("n_mc >= 1 required");
    if (images.empty()) return {};
    const CounterRng rng{seed};
    const std::size_t nb = images.size();
    double sum = 0.0, sumsq = 0.0;
    GridFunction accum = images.front();
    for (std::size_t r = 0; r < n_mc; ++r) {
        std::fill(accum.values.begin(), accum.values.end(), 0.0);
        for (std::size_t j = 0; j < nb; ++j) {
            const double g = rng.gaussian(r * nb + j);
            const auto& src = images[j].values;
            for (std::size_t q = 0; q < accum.values.size(); ++q)
                accum.values[q] += g * src[q];
        }
        const double nrm = norm_E(accum);
        sum += nrm * nrm;
        sumsq += nrm * nrm * nrm * nrm;
    }
    GammaEstimate est;
    est.second_moment = sum / static_cast<double>(n_mc);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(n_mc) - est.second_moment * est.second_moment);
    est.std_error = std::sqrt(var / static_cast<double>(n_mc));
    return est;
}

static void check_orthonormal(const HaarBasis& basis) {
    const std::size_t nb = basis.funcs.size();
    const std::size_t step = nb <= 64 ? 1 : nb / 32;  // spot-check large bases
    for (std::size_t i = 0; i < nb; i += step) {
        if (std::abs(basis.inner(i, i) - 1.0) > 1e-10)
            throw std::invalid_argument("basis is not orthonormal");
        if (i + 1 < nb && std::abs(basis.inner(i, i + 1)) > 1e-10)
            throw std::invalid_argument("basis is not orthonormal");
    }
}

GammaEstimate gamma_norm_estimate(const KernelOperator& R, const HaarBasis& basis,
                                  std::size_t n_mc, std::uint64_t seed) {
    check_orthonormal(basis);
    return gamma_second_moment(kernel_images(R, basis), n_mc, seed);
}

std::vector<GammaEstimate> gamma_norm_depth_sweep(const KernelOperator& R,
                                                  std::size_t depth, double t_len,
                                                  std::size_t n_mc,
                                                  std::uint64_t seed) {
    const HaarBasis basis = haar_basis(depth, t_len);
    const auto images = kernel_images(R, basis);
    const std::size_t nb = images.size();
    const CounterRng rng{seed};
    std::vector<double> sum(depth + 1, 0.0), sumsq(depth + 1, 0.0);
    GridFunction accum = images.front();
    for (std::size_t r = 0; r < n_mc; ++r) {
        std::fill(accum.values.begin(), accum.values.end(), 0.0);
        std::size_t j = 0;
        for (std::size_t lvl = 0; lvl <= depth; ++lvl) {
            // depth lvl adds wavelet level lvl (h_0 alone at lvl 0)
            const std::size_t upto =
                (lvl == 0 ? 1 : (std::size_t{1} << lvl)) * R.d;
            for (; j < upto && j < nb; ++j) {
                const double g = rng.gaussian(r * nb + j);
                const auto& src = images[j].values;
                for (std::size_t q = 0; q < accum.values.size(); ++q)
                    accum.values[q] += g * src[q];
            }
            const double nrm = norm_E(accum);
            sum[lvl] += nrm * nrm;
            sumsq[lvl] += nrm * nrm * nrm * nrm;
        }
    }
    std::vector<GammaEstimate> out(depth + 1);
    for (std::size_t lvl = 0; lvl <= depth; ++lvl) {
        out[lvl].second_moment = sum[lvl] / static_cast<double>(n_mc);
        const double var = std::max(0.0, sumsq[lvl] / static_cast<double>(n_mc) -
                                             out[lvl].second_moment * out[lvl].second_moment);
        out[lvl].std_error = std::sqrt(var / static_cast<double>(n_mc));
    }
    return out;
}

double gamma_norm_hs_oracle(const std::vector<std::vector<double>>& matrix) {
    double s = 0.0;
    for (const auto& row : matrix)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

WeightedGammaResult weighted_gamma_sup(const Semigroup& sg,
                                       const std::vector<GridFunction>& psi,
                                       double alpha, double t, std::size_t depth,
                                       std::size_t n_mc, std::size_t n_s,
                                       std::uint64_t seed) {
    if (alpha <= 0.0 || alpha >= 0.5)
        throw std::invalid_argument("alpha must lie in (0, 1/2)");
    WeightedGammaResult res;
    for (std::size_t k = 1; k <= n_s; ++k) {
        const double s = t * static_cast<double>(k) / static_cast<double>(n_s);
        KernelOperator R;
        R.t_len = s;
        R.d = psi.size();
        R.column = [&sg, &psi, alpha, s](double u, std::size_t c) {
            GridFunction g = sg.apply(s - u, psi[c]);
            g *= std::pow(s - u, -alpha);
            return g;
        };
        const HaarBasis basis = haar_basis(depth, s);
        const auto est = gamma_second_moment(kernel_images(R, basis), n_mc,
                                             derive_stream(seed, k));
        res.per_s.push_back(est.norm());
        res.s_grid.push_back(s);
        res.sup = std::max(res.sup, est.norm());
    }
    return res;
}

}  // namespace sdelay
