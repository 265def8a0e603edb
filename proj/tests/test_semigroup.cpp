// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdelay/semigroup.hpp"

using namespace sdelay;

namespace {

GridFunction sample(const std::shared_ptr<const SpatialGrid>& g, SpaceTag tag,
                    const std::function<double(double)>& f) {
    GridFunction x(g, tag);
    for (std::size_t i = 0; i < g->n_points; ++i) x.values[i] = f(g->nodes[i]);
    if (tag == SpaceTag::C0) x.values[0] = 0.0;
    return x;
}

GridFunction random_c0(const std::shared_ptr<const SpatialGrid>& g,
                       std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    // random smooth-ish profile: a few sine modes
    const double a1 = nd(rng), a2 = nd(rng), a3 = nd(rng);
    return sample(g, SpaceTag::C0, [=](double xi) {
        return a1 * std::sin(M_PI * xi) + a2 * std::sin(2 * M_PI * xi) +
               a3 * std::sin(3 * M_PI * xi);
    });
}

}  // namespace

TEST_CASE("transport semigroup pointwise") {
    auto g = SpatialGrid::unit_interval(101);
    TransportSemigroup sg(g, 0.0);

    auto x = sample(g, SpaceTag::C0, [](double xi) { return xi; });

    // S(0) = I exactly
    auto y0 = sg.apply(0.0, x);
    for (std::size_t i = 0; i < g->n_points; ++i)
        CHECK(y0.values[i] == x.values[i]);

    // nilpotency: S(t >= 1) = 0 exactly
    for (double t : {1.0, 1.5, 7.0}) {
        auto yn = sg.apply(t, x);
        for (double v : yn.values) CHECK(v == 0.0);
    }

    // mu = 0, x(xi) = xi, t = 0.5: (xi - 0.5) 1{xi >= 0.5}
    auto yh = sg.apply(0.5, x);
    for (std::size_t i = 0; i < g->n_points; ++i) {
        const double xi = g->nodes[i];
        const double want = xi >= 0.5 ? xi - 0.5 : 0.0;
        CHECK(yh.values[i] == doctest::Approx(want).epsilon(1e-12));
    }

    CHECK_THROWS(sg.apply(-0.1, x));
}

TEST_CASE("transport contractivity and decay") {
    auto g = SpatialGrid::unit_interval(129);
    TransportSemigroup sg(g, 0.7);
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        auto x = random_c0(g, rng);
        const double t = 0.25 * (rep % 4);
        CHECK(norm_E(sg.apply(t, x)) <= norm_E(x) + 1e-14);
    }
    // decay factor on an aligned shift: e^{-mu t}
    GridFunction spike(g, SpaceTag::C0);
    spike.values[1] = 1.0;
    auto moved = sg.apply(0.5, spike);
    CHECK(norm_E(moved) == doctest::Approx(std::exp(-0.7 * 0.5)).epsilon(1e-12));
}

TEST_CASE("transport semigroup law under refinement") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ud(0.0, 0.8);
    double defect_coarse = 0.0, defect_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t n = pass == 0 ? 129 : 257;
        auto g = SpatialGrid::unit_interval(n);
        TransportSemigroup sg(g, 0.4);
        std::mt19937_64 local(99);  // same (t,s,x) draws at both resolutions
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            std::uniform_real_distribution<double> u(0.0, 0.8);
            const double t = u(local), s = u(local);
            auto x = random_c0(g, local);
            auto once = sg.apply(t + s, x);
            auto twice = sg.apply(t, sg.apply(s, x));
            worst = std::max(worst, norm_E(once - twice));
        }
        (pass == 0 ? defect_coarse : defect_fine) = worst;
    }
    // misaligned shifts are rounded; doubling the grid should shrink the defect
    CHECK(defect_fine <= 0.75 * defect_coarse);
    (void)ud;
}

TEST_CASE("mckendrick extension: trivial fixed points") {
    auto g = SpatialGrid::half_line(401, 10.0);
    auto mu = sample(g, SpaceTag::L1, [](double a) { return 0.2 + 0.1 * std::exp(-a); });

    // b == 0 forces g2 == 0 exactly
    auto b0 = sample(g, SpaceTag::L1, [](double) { return 0.0; });
    McKendrickSemigroup sg0(g, mu, b0, 0.5, 2.0);
    auto gfun = sample(g, SpaceTag::L1, [](double a) { return std::exp(-a); });
    auto ext0 = sg0.extension(gfun);
    for (double v : ext0.values) CHECK(v == 0.0);

    // g == 0 gives the zero fixed point
    auto b = sample(g, SpaceTag::L1, [](double a) { return 0.8 * std::exp(-0.5 * a); });
    McKendrickSemigroup sg(g, mu, b, 1.5, 2.0);
    auto zg = sample(g, SpaceTag::L1, [](double) { return 0.0; });
    auto extz = sg.extension(zg);
    for (double v : extz.values) CHECK(v == 0.0);
}

TEST_CASE("mckendrick renewal residual and contraction factor") {
    auto g = SpatialGrid::half_line(513, 10.0);
    auto mu = sample(g, SpaceTag::L1, [](double a) { return 0.3 + 0.1 / (1.0 + a); });
    auto b = sample(g, SpaceTag::L1, [](double a) { return 0.8 * std::exp(-0.5 * a); });
    McKendrickSemigroup sg(g, mu, b, 1.5, 2.0);
    auto gfun = sample(g, SpaceTag::L1, [](double a) { return std::exp(-a); });

    auto g2 = sg.extension(gfun);
    CHECK(sg.renewal_residual(gfun, g2) < 1e-10);
    CHECK(sg.last_contraction_factor() <= sg.b_mu_sup() / sg.w() + 0.02);
    CHECK(sg.b_mu_sup() < sg.w());

    // contraction condition must be enforced at construction
    CHECK_THROWS(McKendrickSemigroup(g, mu, b, 0.1, 2.0));
}

TEST_CASE("mckendrick extension: resolution-doubling oracle") {
    // mu = 0, b constant: compare a coarse-grid extension against a 4x
    // resolution reference at shared nodes.
    auto bump = [](double a) {
        const double z = (a - 1.0) / 0.4;
        return std::exp(-z * z);
    };
    const double L = 10.0, horizon = 2.0;
    std::vector<double> coarse_vals, fine_vals;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t n = pass == 0 ? 251 : 1001;  // spacing 0.04 / 0.01
        auto g = SpatialGrid::half_line(n, L);
        auto mu = sample(g, SpaceTag::L1, [](double) { return 0.0; });
        auto b = sample(g, SpaceTag::L1, [](double) { return 0.6; });
        McKendrickSemigroup sg(g, mu, b, 1.0, horizon);
        auto gf = sample(g, SpaceTag::L1, bump);
        auto ext = sg.extension(gf);
        // record s = 0, 0.4, ..., 2.0 (indices aligned at both resolutions)
        const std::size_t stride = pass == 0 ? 10 : 40;
        auto& dst = pass == 0 ? coarse_vals : fine_vals;
        for (std::size_t k = 0; k * stride < ext.values.size() && k <= 5; ++k)
            dst.push_back(ext.values[k * stride]);
    }
    REQUIRE(coarse_vals.size() == fine_vals.size());
    for (std::size_t i = 0; i < coarse_vals.size(); ++i)
        CHECK(coarse_vals[i] ==
              doctest::Approx(fine_vals[i]).epsilon(5e-3).scale(1.0));
}

TEST_CASE("mckendrick apply") {
    auto g = SpatialGrid::half_line(801, 10.0);
    const double m = 0.25;
    auto mu = sample(g, SpaceTag::L1, [=](double) { return m; });
    auto b0 = sample(g, SpaceTag::L1, [](double) { return 0.0; });
    McKendrickSemigroup sg(g, mu, b0, 0.5, 2.0);
    auto gf = sample(g, SpaceTag::L1, [](double a) { return std::exp(-0.8 * a); });

    // t = 0 is the identity
    auto id = sg.apply(0.0, gf);
    for (std::size_t i = 0; i < g->n_points; ++i) CHECK(id.values[i] == gf.values[i]);

    // b == 0, mu constant: pure decayed shift
    const double t = 0.5;
    auto y = sg.apply(t, gf);
    for (std::size_t i = 0; i < g->n_points; ++i) {
        const double a = g->nodes[i];
        const double want = a >= t ? std::exp(-m * t) * std::exp(-0.8 * (a - t)) : 0.0;
        CHECK(y.values[i] == doctest::Approx(want).epsilon(1e-9));
    }

    // mass balance: || S(t) g ||_L1 = e^{-mt} ||g||_L1 minus boundary escape
    auto ones = sample(g, SpaceTag::L1, [](double) { return 1.0; });
    auto moved = sg.apply(t, ones);
    const double lhs = norm_E(moved);
    const double rhs = std::exp(-m * t) * norm_E(ones) -
                       std::exp(-m * t) * t;  // escaped slab of the constant 1
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
    CHECK(sg.boundary_escape_mass(t) ==
          doctest::Approx(std::exp(-m * t) * t).epsilon(2e-2));

    CHECK_THROWS(sg.apply(5.0, gf));  // beyond the extension horizon
}

TEST_CASE("mckendrick semigroup law under refinement") {
    double defect_coarse = 0.0, defect_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t n = pass == 0 ? 321 : 641;
        auto g = SpatialGrid::half_line(n, 10.0);
        auto mu = sample(g, SpaceTag::L1, [](double a) { return 0.3 + 0.1 / (1 + a); });
        auto b = sample(g, SpaceTag::L1, [](double a) { return 0.8 * std::exp(-0.5 * a); });
        McKendrickSemigroup sg(g, mu, b, 1.5, 2.5);
        auto gf = sample(g, SpaceTag::L1, [](double a) { return std::exp(-a) * a; });
        double worst = 0.0;
        for (auto [t, s] : {std::pair{0.5, 0.25}, {0.75, 0.5}, {0.25, 1.0}}) {
            auto once = sg.apply(t + s, gf);
            auto twice = sg.apply(t, sg.apply(s, gf));
            worst = std::max(worst, norm_E(once - twice));
        }
        (pass == 0 ? defect_coarse : defect_fine) = worst;
    }
    CHECK(defect_fine <= 0.75 * defect_coarse);
}

TEST_CASE("finite-dim semigroup") {
    // M = 0: identity
    FiniteDimSemigroup z({{0.0, 0.0}, {0.0, 0.0}});
    GridFunction v(SpatialGrid::unit_interval(2), SpaceTag::Euclidean);
    v.values = {1.0, -2.0};
    auto vi = z.apply(3.0, v);
    CHECK(vi.values[0] == doctest::Approx(1.0));
    CHECK(vi.values[1] == doctest::Approx(-2.0));

    // M = -I: scalar exponential decay
    FiniteDimSemigroup d({{-1.0, 0.0}, {0.0, -1.0}});
    auto vd = d.apply(1.0, v);
    CHECK(vd.values[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(vd.values[1] == doctest::Approx(-2.0 * std::exp(-1.0)));

    // random 3x3: semigroup law to near machine precision
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<std::vector<double>> M(3, std::vector<double>(3));
    for (auto& row : M)
        for (auto& x : row) x = nd(rng);
    FiniteDimSemigroup sg(M);
    std::vector<double> w{nd(rng), nd(rng), nd(rng)};
    const auto once = sg.apply_vec(0.7, w);
    const auto twice = sg.apply_vec(0.3, sg.apply_vec(0.4, w));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(once[i] == doctest::Approx(twice[i]).epsilon(1e-10));

    CHECK_THROWS(FiniteDimSemigroup({{1.0, 2.0}}));  // not square
}

TEST_CASE("s_curl_apply") {
    auto g = SpatialGrid::unit_interval(65);
    TransportSemigroup sg(g, 0.0);
    auto x = sample(g, SpaceTag::C0, [](double xi) { return std::sin(M_PI * xi); });
    const std::size_t m = 16;

    // s = 0: empty support interval
    auto s0 = s_curl_apply(sg, 0.0, x, m, 2.0);
    for (const auto& fr : s0.frames)
        for (double v : fr.values) CHECK(v == 0.0);

    // s >= 1: S(theta + s) x on all of [-1, 0]
    auto s2 = s_curl_apply(sg, 1.25, x, m, 2.0);
    for (std::size_t j = 0; j <= m; ++j) {
        const double theta = -1.0 + static_cast<double>(j) / m;
        auto want = sg.apply(theta + 1.25, x);
        CHECK(norm_E(s2.frames[j] - want) == 0.0);
    }

    // s = 0.5, theta = -0.25 reads S(0.25) x
    auto sh = s_curl_apply(sg, 0.5, x, m, 2.0);
    const std::size_t j_quarter = 12;  // theta = -0.25
    CHECK(norm_E(sh.frames[j_quarter] - sg.apply(0.25, x)) == 0.0);
    // theta below -s is zero
    for (double v : sh.frames[2].values) CHECK(v == 0.0);  // theta = -0.875
}

TEST_CASE("left_translation_apply") {
    auto g = SpatialGrid::unit_interval(33);
    const std::size_t m = 8;
    SegmentFunction f;
    f.p = 2.0;
    for (std::size_t j = 0; j <= m; ++j) {
        GridFunction fr(g, SpaceTag::C0);
        for (std::size_t i = 1; i < g->n_points; ++i)
            fr.values[i] = static_cast<double>(j);  // tag the frame index
        f.frames.push_back(fr);
    }

    auto t0 = left_translation_apply(0.0, f);
    for (std::size_t j = 0; j <= m; ++j)
        CHECK(t0.frames[j].values[1] == f.frames[j].values[1]);

    auto gone = left_translation_apply(1.0, f);
    for (std::size_t j = 0; j < m; ++j)
        CHECK(gone.frames[j].values[1] == 0.0);
    CHECK(gone.frames[m].values[1] == 0.0);

    // t = 0.5: f(theta + 0.5) on theta in [-1, -0.5), zero at and above the
    // theta + t = 0 boundary (the S-branch owns that point)
    auto half = left_translation_apply(0.5, f);
    for (std::size_t j = 0; j < m / 2; ++j)
        CHECK(half.frames[j].values[1] == doctest::Approx(j + m / 2.0));
    for (std::size_t j = m / 2; j <= m; ++j)
        CHECK(half.frames[j].values[1] == 0.0);
}

TEST_CASE("delay semigroup block structure") {
    auto g = SpatialGrid::unit_interval(65);
    TransportSemigroup inner(g, 0.3);
    const std::size_t m = 16;
    std::mt19937_64 rng(31);

    LiftedState y;
    y.head = random_c0(g, rng);
    y.tail.p = 2.0;
    for (std::size_t j = 0; j <= m; ++j) y.tail.frames.push_back(random_c0(g, rng));

    // t = 0 leaves the state unchanged
    auto id = delay_semigroup_apply(inner, 0.0, y, 2.0);
    CHECK(norm_E(id.head - y.head) == 0.0);
    for (std::size_t j = 0; j <= m; ++j)
        CHECK(norm_E(id.tail.frames[j] - y.tail.frames[j]) == 0.0);

    // zero tail, t >= 1: [S(t) head, theta -> S(t + theta) head]
    LiftedState y0 = y;
    for (auto& fr : y0.tail.frames) std::fill(fr.values.begin(), fr.values.end(), 0.0);
    auto far = delay_semigroup_apply(inner, 1.25, y0, 2.0);
    CHECK(norm_E(far.head - inner.apply(1.25, y.head)) == 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
        const double theta = -1.0 + static_cast<double>(j) / m;
        CHECK(norm_E(far.tail.frames[j] - inner.apply(1.25 + theta, y.head)) == 0.0);
    }
}

TEST_CASE("delay semigroup law under refinement") {
    std::mt19937_64 rng(41);
    double defect_coarse = 0.0, defect_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t n = pass == 0 ? 65 : 129;
        const std::size_t m = pass == 0 ? 16 : 32;
        auto g = SpatialGrid::unit_interval(n);
        TransportSemigroup inner(g, 0.3);
        std::mt19937_64 local(77);
        double worst = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            LiftedState y;
            y.head = random_c0(g, local);
            y.tail.p = 2.0;
            for (std::size_t j = 0; j <= m; ++j)
                y.tail.frames.push_back(random_c0(g, local));
            const double t = 0.25, s = 0.375;
            auto once = delay_semigroup_apply(inner, t + s, y, 2.0);
            auto twice =
                delay_semigroup_apply(inner, t, delay_semigroup_apply(inner, s, y, 2.0), 2.0);
            LiftedState diff;
            diff.head = once.head - twice.head;
            diff.tail.p = 2.0;
            for (std::size_t j = 0; j <= m; ++j)
                diff.tail.frames.push_back(once.tail.frames[j] - twice.tail.frames[j]);
            worst = std::max(worst, norm_Ep(diff, 2.0));
        }
        (pass == 0 ? defect_coarse : defect_fine) = worst;
    }
    // the first-order parts of the defect halve (or better) under doubling;
    // an exactly-zero coarse defect is also acceptable
    CHECK(defect_fine <= std::max(0.75 * defect_coarse, 1e-14));
}
