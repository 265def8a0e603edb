// SPDX-License-Identifier: Apache-2.0
#include "sdelay/semigroup.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace sdelay {

// ---------------------------------------------------------------- transport

TransportSemigroup::TransportSemigroup(std::shared_ptr<const SpatialGrid> grid,
                                       double mu_decay)
    : grid_(std::move(grid)), mu_(mu_decay) {
    if (grid_->kind != GridKind::UnitInterval)
        throw std::invalid_argument("transport semigroup lives on [0,1]");
    if (mu_ < 0.0) throw std::invalid_argument("decay rate must be >= 0");
}

GridFunction TransportSemigroup::apply(double t, const GridFunction& x) const {
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (x.values.size() != grid_->n_points)
        throw std::invalid_argument("grid mismatch");
    const double h = grid_->spacing();
    const auto n = static_cast<long long>(grid_->n_points);
    auto r = static_cast<long long>(std::llround(t / h));
    GridFunction out = x;
    if (r <= 0) return out;
    if (r >= n) r = n;  // nilpotent regime
    const double decay = std::exp(-mu_ * h * static_cast<double>(r));
    for (long long i = n - 1; i >= r; --i)
        out.values[static_cast<std::size_t>(i)] =
            decay * x.values[static_cast<std::size_t>(i - r)];
    for (long long i = std::min(r, n) - 1; i >= 0; --i)
        out.values[static_cast<std::size_t>(i)] = 0.0;
    return out;
}

// --------------------------------------------------------------- mckendrick

namespace {
std::uint64_t fnv_hash(const std::vector<double>& v) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

struct ExtensionCache {
    std::mutex mtx;
    std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>> map;
};
// One cache per semigroup instance would need the instance mutable; a process
// cache keyed by (this, hash) keeps apply() const and thread-safe.
ExtensionCache& extension_cache() {
    static ExtensionCache c;
    return c;
}
}  // namespace

McKendrickSemigroup::McKendrickSemigroup(std::shared_ptr<const SpatialGrid> grid,
                                         GridFunction mu, GridFunction b, double w,
                                         double horizon, RenewalConfig cfg)
    : grid_(std::move(grid)), mu_(std::move(mu)), b_(std::move(b)), w_(w),
      horizon_(horizon), cfg_(cfg) {
    if (grid_->kind != GridKind::HalfLine)
        throw std::invalid_argument("McKendrick semigroup lives on a truncated half-line");
    if (mu_.values.size() != grid_->n_points || b_.values.size() != grid_->n_points)
        throw std::invalid_argument("mu/b must be sampled on the semigroup grid");
    const double h = grid_->spacing();
    cum_mu_.resize(grid_->n_points, 0.0);
    for (std::size_t i = 1; i < grid_->n_points; ++i)
        cum_mu_[i] = cum_mu_[i - 1] + 0.5 * h * (mu_.values[i - 1] + mu_.values[i]);
    b_mu_.resize(grid_->n_points);
    for (std::size_t i = 0; i < grid_->n_points; ++i) {
        b_mu_[i] = std::exp(-cum_mu_[i]) * b_.values[i];
        b_mu_sup_ = std::max(b_mu_sup_, std::abs(b_mu_[i]));
    }
    if (w_ <= b_mu_sup_)
        throw std::invalid_argument(
            "contraction condition violated: weight w must exceed sup|b_mu|");
    n_renewal_ = static_cast<std::size_t>(std::ceil(horizon_ / h - 1e-9)) + 1;
    if (n_renewal_ > grid_->n_points)
        throw std::invalid_argument("extension horizon exceeds the truncated domain");
}

std::vector<double> McKendrickSemigroup::convolve_bmu(const std::vector<double>& f) const {
    const double h = grid_->spacing();
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = 1; k < f.size(); ++k) {
        double s = 0.5 * (b_mu_[0] * f[k] + b_mu_[k] * f[0]);
        for (std::size_t u = 1; u < k; ++u) s += b_mu_[u] * f[k - u];
        out[k] = s * h;
    }
    return out;
}

std::vector<double> McKendrickSemigroup::renewal_source(const GridFunction& g) const {
    // T_{mu,b} g(s) = int_0^inf e^{-int_r^{r+s} mu} g(r) b(r+s) dr, truncated
    // where r+s leaves the grid.
    const double h = grid_->spacing();
    const std::size_t n = grid_->n_points;
    std::vector<double> out(n_renewal_, 0.0);
    for (std::size_t k = 0; k < n_renewal_; ++k) {
        const std::size_t top = n - 1 - k;  // r index range with r+s on grid
        if (top == 0) continue;
        double s = 0.0;
        for (std::size_t i = 0; i <= top; ++i) {
            const double term = std::exp(-(cum_mu_[i + k] - cum_mu_[i])) *
                                g.values[i] * b_.values[i + k];
            s += (i == 0 || i == top) ? 0.5 * term : term;
        }
        out[k] = s * h;
    }
    return out;
}

double McKendrickSemigroup::weighted_norm(const std::vector<double>& f) const {
    const double h = grid_->spacing();
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        a[i] = std::abs(f[i]) * std::exp(-w_ * h * static_cast<double>(i));
    return trapezoid(a, h);
}

GridFunction McKendrickSemigroup::extension(const GridFunction& g) const {
    if (g.values.size() != grid_->n_points)
        throw std::invalid_argument("grid mismatch");
    const auto source = renewal_source(g);
    std::vector<double> g2(n_renewal_, 0.0);
    double prev_dist = -1.0;
    last_contraction_ = 0.0;
    bool converged = false;
    for (std::size_t it = 0; it < cfg_.max_iter; ++it) {
        auto next = convolve_bmu(g2);
        for (std::size_t i = 0; i < n_renewal_; ++i) next[i] += source[i];
        std::vector<double> diff(n_renewal_);
        for (std::size_t i = 0; i < n_renewal_; ++i) diff[i] = next[i] - g2[i];
        const double dist = weighted_norm(diff);
        g2 = std::move(next);
        last_iterations_ = it + 1;
        if (prev_dist > 0.0)
            last_contraction_ = std::max(last_contraction_, dist / prev_dist);
        prev_dist = dist;
        if (dist < cfg_.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("renewal iteration did not converge within max_iter");
    GridFunction out;
    out.grid = grid_;
    out.tag = SpaceTag::L1Weighted;
    out.weight = w_;
    out.values.assign(grid_->n_points, 0.0);
    for (std::size_t i = 0; i < n_renewal_; ++i) out.values[i] = g2[i];
    return out;
}

double McKendrickSemigroup::renewal_residual(const GridFunction& g,
                                             const GridFunction& g2) const {
    std::vector<double> v(g2.values.begin(),
                          g2.values.begin() + static_cast<long>(n_renewal_));
    const auto conv = convolve_bmu(v);
    const auto source = renewal_source(g);
    std::vector<double> res(n_renewal_);
    for (std::size_t i = 0; i < n_renewal_; ++i) res[i] = v[i] - conv[i] - source[i];
    return weighted_norm(res);
}

GridFunction McKendrickSemigroup::apply(double t, const GridFunction& g) const {
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (g.values.size() != grid_->n_points)
        throw std::invalid_argument("grid mismatch");
    const double h = grid_->spacing();
    const auto n = static_cast<long long>(grid_->n_points);
    const auto r = static_cast<long long>(std::llround(t / h));
    GridFunction out = g;
    if (r == 0) return out;
    if (r >= static_cast<long long>(n_renewal_))
        throw std::invalid_argument("time exceeds the extension horizon");

    std::shared_ptr<const std::vector<double>> g2;
    {
        const auto key = fnv_hash(g.values) ^
                         (reinterpret_cast<std::uintptr_t>(this) * 0x9e3779b97f4a7c15ull);
        auto& cache = extension_cache();
        std::scoped_lock lock(cache.mtx);
        auto it = cache.map.find(key);
        if (it != cache.map.end()) g2 = it->second;
    }
    if (!g2) {
        auto ext = extension(g);
        auto stored = std::make_shared<std::vector<double>>(std::move(ext.values));
        const auto key = fnv_hash(g.values) ^
                         (reinterpret_cast<std::uintptr_t>(this) * 0x9e3779b97f4a7c15ull);
        auto& cache = extension_cache();
        std::scoped_lock lock(cache.mtx);
        g2 = cache.map.emplace(key, std::move(stored)).first->second;
    }

    for (long long i = n - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        if (i >= r) {
            out.values[ui] = std::exp(-(cum_mu_[ui] - cum_mu_[static_cast<std::size_t>(i - r)])) *
                             g.values[static_cast<std::size_t>(i - r)];
        } else {
            // age below t: survived newborns, int_{a-t}^a mu = int_0^a mu
            out.values[ui] =
                std::exp(-cum_mu_[ui]) * (*g2)[static_cast<std::size_t>(r - i)];
        }
    }
    return out;
}

double McKendrickSemigroup::boundary_escape_mass(double t) const {
    // Mass of S(t)1 pushed past the truncation boundary, with mu frozen at its
    // boundary value beyond the grid.
    const double h = grid_->spacing();
    const std::size_t n = grid_->n_points;
    const double mu_end = mu_.values.back();
    const auto r = static_cast<std::size_t>(std::llround(t / h));
    std::vector<double> slab;
    slab.reserve(r + 1);
    for (std::size_t j = 0; j <= r; ++j) {
        // node a = L + j*h came from a - t inside the grid
        const double extra = mu_end * h * static_cast<double>(j);
        const std::size_t src = n - 1 - (r - j);
        const double integral = (cum_mu_[n - 1] - cum_mu_[src]) + extra;
        slab.push_back(std::exp(-integral));
    }
    return trapezoid(slab, h);
}

// --------------------------------------------------------------- finite-dim

FiniteDimSemigroup::FiniteDimSemigroup(std::vector<std::vector<double>> matrix)
    : n_(matrix.size()) {
    if (n_ == 0) throw std::invalid_argument("empty matrix");
    m_.reserve(n_ * n_);
    for (const auto& row : matrix) {
        if (row.size() != n_) throw std::invalid_argument("matrix must be square");
        for (double v : row) m_.push_back(v);
    }
    index_grid_ = n_ >= 2 ? SpatialGrid::unit_interval(n_) : nullptr;
}

std::vector<double> FiniteDimSemigroup::apply_vec(double t,
                                                  const std::vector<double>& v) const {
    if (v.size() != n_) throw std::invalid_argument("dimension mismatch");
    Eigen::MatrixXd M(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                t * m_[i * n_ + j];
    const Eigen::MatrixXd E = M.exp();
    Eigen::VectorXd x(n_);
    for (std::size_t i = 0; i < n_; ++i) x(static_cast<Eigen::Index>(i)) = v[i];
    Eigen::VectorXd y = E * x;
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = y(static_cast<Eigen::Index>(i));
    return out;
}

GridFunction FiniteDimSemigroup::apply(double t, const GridFunction& v) const {
    GridFunction out = v;
    out.values = apply_vec(t, v.values);
    return out;
}

// ------------------------------------------------------------- delay blocks

SegmentFunction s_curl_apply(const Semigroup& inner, double s, const GridFunction& x,
                             std::size_t m_history, double p) {
    if (s < 0.0) throw std::invalid_argument("negative time");
    SegmentFunction seg;
    seg.p = p;
    seg.frames.reserve(m_history + 1);
    GridFunction zero = x;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    const double dth = 1.0 / static_cast<double>(m_history);
    for (std::size_t j = 0; j <= m_history; ++j) {
        const double theta = -1.0 + dth * static_cast<double>(j);
        const double tau = theta + s;
        if (s > 0.0 && tau >= -1e-12)
            seg.frames.push_back(inner.apply(std::max(tau, 0.0), x));
        else
            seg.frames.push_back(zero);
    }
    return seg;
}

SegmentFunction left_translation_apply(double t, const SegmentFunction& f) {
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (t == 0.0) return f;
    const std::size_t m = f.m_history();
    SegmentFunction out;
    out.p = f.p;
    out.frames.reserve(m + 1);
    GridFunction zero = f.frames.front();
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    const double dth = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j <= m; ++j) {
        const double tau = -1.0 + dth * static_cast<double>(j) + t;
        // theta + t = 0 belongs to the S-branch of the delay semigroup, so the
        // translation part is zero there (strict inequality)
        if (tau < -1e-12) {
            auto idx = static_cast<long long>(std::llround((tau + 1.0) / dth));
            idx = std::min(idx, static_cast<long long>(m));
            if (idx >= 0)
                out.frames.push_back(f.frames[static_cast<std::size_t>(idx)]);
            else
                out.frames.push_back(zero);
        } else {
            out.frames.push_back(zero);
        }
    }
    return out;
}

LiftedState delay_semigroup_apply(const Semigroup& inner, double t,
                                  const LiftedState& y, double p) {
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (!y.tail.frames.empty() &&
        y.tail.frames.front().values.size() != y.head.values.size())
        throw std::invalid_argument("head/tail grid mismatch");
    if (t == 0.0) return y;
    LiftedState out;
    out.head = inner.apply(t, y.head);
    const std::size_t m = y.tail.m_history();
    out.tail.p = p;
    out.tail.frames.reserve(m + 1);
    const double dth = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j <= m; ++j) {
        const double tau = -1.0 + dth * static_cast<double>(j) + t;
        if (tau >= -1e-12) {
            out.tail.frames.push_back(inner.apply(std::max(tau, 0.0), y.head));
        } else {
            const auto idx = static_cast<std::size_t>(std::llround((tau + 1.0) / dth));
            out.tail.frames.push_back(y.tail.frames[idx]);
        }
    }
    return out;
}

}  // namespace sdelay
