#include <doctest.h>

#include <cmath>

#include "analytic.hpp"

using namespace aztec;

namespace {

const WeightDistribution kPoint = WeightDistribution::point_mass(0.5);
const WeightDistribution kBern = WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5});

std::vector<WeightDistribution> four_laws() {
    return {kPoint, kBern, WeightDistribution::uniform_on_w(0.0, 2.0), WeightDistribution::two_point(0.5, 0.2)};
}

}  // namespace

TEST_CASE("LLN moments against exact residues") {
    // residues of F^(k+1)/z at z = 1, computed symbolically
    const ModelParams bern1 = ModelParams::from_a(1.0, kBern);
    CHECK(lln_moment_contour(1, bern1) == doctest::Approx(13.0 / 12).epsilon(1e-13));
    CHECK(lln_moment_contour(2, bern1) == doctest::Approx(23.0 / 16).epsilon(1e-13));
    CHECK(lln_moment_contour(3, bern1) == doctest::Approx(3671.0 / 1728).epsilon(1e-13));
    CHECK(lln_moment_contour(4, bern1) == doctest::Approx(115747.0 / 34560).epsilon(1e-13));
    const ModelParams bern3 = ModelParams::from_a(1.0 / 3, kBern);
    CHECK(lln_moment_contour(1, bern3) == doctest::Approx(25.0 / 36).epsilon(1e-13));
    CHECK(lln_moment_contour(2, bern3) == doctest::Approx(811.0 / 1296).epsilon(1e-13));
    CHECK(lln_moment_contour(3, bern3) == doctest::Approx(29503.0 / 46656).epsilon(1e-13));
    const ModelParams pm = ModelParams::from_alpha(0.5, kPoint);
    CHECK(pm.a == doctest::Approx(1.0));
    CHECK(lln_moment_contour(2, pm) == doctest::Approx(4.0 / 3).epsilon(1e-13));
    CHECK(lln_moment_contour(3, pm) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(lln_moment_contour(4, pm) == doctest::Approx(16.0 / 5).epsilon(1e-13));
    CHECK_THROWS_AS(lln_moment_contour(0, pm), std::invalid_argument);
}

TEST_CASE("LLN: contour, jets and factorized forms agree") {
    for (const auto& d : four_laws())
        for (double a : {0.0, 0.5, 1.0, 3.0}) {
            const ModelParams p = ModelParams::from_a(a, d);
            const FFamily f = schur_family(a, d);
            for (int k = 1; k <= 6; ++k) {
                const double c = lln_moment_contour(k, p);
                CHECK(std::abs(c - lln_moment_general(k, f)) < 1e-8);
                CHECK(std::abs(c - lln_moment_sanity(k, a, d)) < 1e-8);
                if (a == 0.0) CHECK(std::abs(c - 1.0 / (k + 1)) < 1e-12);
            }
            CHECK(std::abs(lln_moment_contour(1, p) - (0.5 + a * d.mean())) < 1e-13);
        }
    // a different contour around the same poles gives the same value
    const ModelParams p = ModelParams::from_a(1.0, kBern);
    CHECK(std::abs(lln_moment_contour(5, p, ContourSpec{1.0, 0.625, 1024}) - lln_moment_contour(5, p)) < 1e-12);
}

TEST_CASE("factorized and Schur families: same LLN, different fluctuations") {
    const FFamily s = schur_family(1.0, kPoint), f = factorized_family(1.0, kPoint);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(lln_moment_general(k, s) - lln_moment_general(k, f)) < 1e-12);
    const FFamily sb = schur_family(1.0, kBern), fb = factorized_family(1.0, kBern);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(lln_moment_general(k, sb) - lln_moment_general(k, fb)) < 1e-10);
    // only the Schur family carries the environment variance
    CHECK(std::abs(clt_cov_general(1, 1, sb) - 1.0 / 16) < 1e-8);
    CHECK(std::abs(clt_cov_general(1, 1, fb)) < 1e-8);
}

TEST_CASE("free cumulants against symbolic values") {
    // a = 0 is the uniform law on [0,1]: B_k^+/k! pattern
    const auto c0 = free_cumulants(6, ModelParams::from_a(0.0, kPoint));
    const double expect0[] = {0.5, 1.0 / 12, 0.0, -1.0 / 720, 0.0, 1.0 / 30240};
    for (int k = 0; k < 6; ++k) CHECK(std::abs(c0[k] - expect0[k]) < 1e-12);
    const auto cb = free_cumulants(4, ModelParams::from_a(1.0, kBern));
    const double expectb[] = {13.0 / 12, 19.0 / 72, -1.0 / 216, -73.0 / 12960};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(cb[k] - expectb[k]) < 1e-12);
    CHECK_THROWS_AS(free_cumulants(kMaxFreeCumulant + 1, ModelParams::from_a(1.0, kBern)), std::invalid_argument);
}

TEST_CASE("moment-cumulant maps are inverse") {
    for (const auto& d : four_laws()) {
        const ModelParams p = ModelParams::from_alpha(0.4, d);
        const auto c = free_cumulants(6, p);
        const auto mu = moments_from_free_cumulants(c);
        for (int k = 1; k <= 6; ++k) CHECK(std::abs(mu[k - 1] - lln_moment_contour(k, p)) < 1e-8);
        const auto back = free_cumulants_from_moments(mu);
        for (int k = 0; k < 6; ++k) CHECK(std::abs(back[k] - c[k]) < 1e-10);
    }
    // only c_1 = m nonzero: the point mass at m
    const auto mu = moments_from_free_cumulants({2.0, 0.0, 0.0});
    CHECK(mu[2] == doctest::Approx(8.0));
}

TEST_CASE("limit shape of the uniform measure") {
    // roots of z/(z-1) + a z/(z+1) = y/alpha, solved symbolically
    auto pt = limit_shape_density(0.5, 0.5, kPoint);
    CHECK(pt.liquid);
    CHECK(std::abs(pt.z - cplx(0.0, 1.0)) < 1e-10);
    CHECK(pt.density == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pt.upper_roots == 1);

    pt = limit_shape_density(0.5, 0.25, kPoint);
    CHECK(std::abs(pt.z - cplx(0.0, 0.5773502691896257)) < 1e-10);
    CHECK(pt.density == doctest::Approx(0.5).epsilon(1e-10));

    pt = limit_shape_density(0.3, 0.4, kPoint);
    CHECK(std::abs(pt.z - cplx(1.0 / 3, 0.7453559924999299)) < 1e-10);
    CHECK(pt.density == doctest::Approx(0.36613976359938505).epsilon(1e-10));

    pt = limit_shape_density(0.25, 0.5, kPoint);
    CHECK(pt.density == doctest::Approx(1.0 / 3).epsilon(1e-10));

    // corners are frozen
    for (auto [al, y] : {std::pair{0.1, 0.01}, {0.1, 0.099}, {0.9, 0.02}, {0.9, 0.98}}) {
        const auto q = limit_shape_density(al, y, kPoint);
        CHECK_FALSE(q.liquid);
        CHECK((q.density == 0.0 || q.density == 1.0));
    }
    CHECK_THROWS_AS(limit_shape_density(0.0, 0.5, kPoint), std::invalid_argument);
    CHECK_THROWS_AS(limit_shape_density(0.5, 1.5, kPoint), std::invalid_argument);
}

TEST_CASE("limit shape grid: range, mass, mean and transitions") {
    for (const auto& d : four_laws()) {
        const int n = 80;
        const auto g = limit_shape_grid(d, n, 2);
        REQUIRE(g.points.size() == static_cast<std::size_t>(n * n));
        for (const auto& p : g.points) {
            CHECK((p.density >= 0.0 && p.density <= 1.0));
            CHECK(p.upper_roots <= 1);
            if (p.liquid) CHECK(p.residual < 1e-9);
        }
        // the slice at alpha = 1/2 has total mass 1 and first moment mu_1 in Y = y/alpha
        const double al = 0.5;
        const LimitShapeSolver s(d, al);
        const int m = 4000;
        double mass = 0, mean = 0;
        for (int j = 0; j < m; ++j) {
            const double y = (j + 0.5) / m;
            const double dY = 1.0 / m / al;
            const double rho = s.solve(y).density;
            mass += rho * dY;
            mean += (y / al) * rho * dY;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
        CHECK(mean == doctest::Approx(0.5 + (1 / al - 1) * d.mean()).epsilon(2e-3));
        // frozen/liquid switches happen within one cell of a double-root level
        for (int i = 0; i < n; ++i) {
            const auto levels = LimitShapeSolver(d, (i + 0.5) / n).double_root_levels();
            for (int j = 0; j + 1 < n; ++j) {
                const auto& a = g.points[i * n + j];
                const auto& b = g.points[i * n + j + 1];
                if (a.liquid == b.liquid) continue;
                double best = 1e9;
                for (double L : levels) best = std::min(best, std::abs(L - 0.5 * (a.y + b.y)));
                CHECK(best <= 1.0 / n);
            }
        }
    }
}

TEST_CASE("grid is independent of the worker count") {
    const auto a = limit_shape_grid(kBern, 40, 1), b = limit_shape_grid(kBern, 40, 3);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].density == b.points[i].density);
}

TEST_CASE("arctic curve") {
    const auto circle = arctic_curve(kPoint, 1000);
    double dev = 0;
    for (const auto& q : circle) dev = std::max(dev, std::abs(std::pow(2 * q.alpha - 1, 2) + std::pow(2 * q.y - 1, 2) - 1));
    CHECK(dev < 1e-6);
    for (std::size_t i = 1; i < circle.size(); ++i) CHECK(circle[i - 1].alpha <= circle[i].alpha);
    for (const auto& d : four_laws())
        for (const auto& q : arctic_curve(d, 300)) {
            CHECK((q.alpha >= -1e-12 && q.alpha <= 1 + 1e-12));
            CHECK((q.y >= -1e-12 && q.y <= 1 + 1e-12));
        }
}

TEST_CASE("fixed-regime covariance") {
    for (const auto& d : four_laws())
        for (double alpha : {0.3, 0.5, 0.8}) {
            const ModelParams p = ModelParams::from_alpha(alpha, d);
            const FFamily f = schur_family(p.a, d);
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    const double c = clt_cov_fixed(k, l, p);
                    CHECK(std::abs(c - clt_cov_general(k, l, f)) < 1e-6);
                    CHECK(std::abs(c - clt_cov_fixed(l, k, p)) < 1e-12);
                }
            CHECK(std::abs(clt_cov_fixed(1, 1, p) - p.a * d.variance()) < 1e-10);
        }
    const ModelParams pm = ModelParams::from_alpha(0.5, kPoint);
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(clt_cov_fixed(k, k, pm)) < 1e-12);
    // at a = 1 the two printed forms coincide
    const ModelParams b1 = ModelParams::from_a(1.0, kBern);
    CHECK(std::abs(clt_cov_fixed(2, 3, b1, CltForm::Literal) - clt_cov_fixed(2, 3, b1)) < 1e-12);
    const ModelParams b2 = ModelParams::from_a(2.0, kBern);
    CHECK(std::abs(clt_cov_fixed(2, 3, b2, CltForm::Literal) - clt_cov_fixed(2, 3, b2)) > 1e-6);
    CHECK(clt_cov_fixed(1, 1, b1) == doctest::Approx(1.0 / 16));
}

TEST_CASE("critical-regime covariance") {
    // alpha^2 (1 - alpha) sigma^2 + GFF part 1/16 at alpha = 1/2
    CHECK(clt_cov_critical(1, 1, 0.5, 0.5, 0.5, 1.0) == doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(clt_cov_critical(1, 1, 0.5, 0.5, 0.5, 0.0) == doctest::Approx(0.0625).epsilon(1e-12));
    // cross level: environment part alpha1 alpha2 (1 - alpha2) sigma^2, GFF part 1/36
    CHECK(clt_cov_critical(1, 1, 1.0 / 3, 2.0 / 3, 0.5, 1.0) == doctest::Approx(1.0 / 36 + 2.0 / 27).epsilon(1e-12));
    CHECK(clt_cov_critical(1, 1, 1.0 / 3, 2.0 / 3, 0.5, 0.0) == doctest::Approx(1.0 / 36).epsilon(1e-12));
    for (int k = 1; k <= 2; ++k)
        for (int l = 1; l <= 3; ++l)
            CHECK(std::abs(clt_cov_critical(k, l, 0.3, 0.7, 0.4, 0.8) - clt_cov_critical(l, k, 0.7, 0.3, 0.4, 0.8)) <
                  1e-12);
    // the generic one-level path with 𝖥(u) = a β/(1 - β + β u) and no environment kernel gives the GFF part
    for (double al : {0.5, 0.3}) {
        const double a = 1 / al - 1, be = 0.5;
        const double bg2 = clt_cov_bg2(1, 2, [&](cplx u) { return a * be / (1.0 - be + be * u); }, nullptr);
        CHECK(std::abs(al * al * al * bg2 - clt_cov_critical(1, 2, al, al, be, 0.0)) < 1e-10);
    }
    CHECK_THROWS_AS(clt_cov_critical(1, 1, 0.0, 0.5, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("Schur generating function identity") {
    for (const auto& d : {kPoint, kBern})
        for (int N = 1; N <= 3; ++N)
            for (int M = N; M <= N + 3; ++M) {
                std::vector<double> xs{0.8, 1.25, 0.6};
                xs.resize(N);
                const std::vector<cplx> zs(xs.begin(), xs.end());
                CHECK(std::abs(sgf_annealed(zs, N, M, d).real() - sgf_schur_sum(xs, N, M, d)) < 1e-10);
            }
    // at x = 1 every normalized Schur function is 1
    CHECK(std::abs(sgf_annealed({1.0, 1.0}, 2, 5, kBern) - 1.0) < 1e-14);
}

TEST_CASE("lemma property suite") {
    const auto r = lemma_property_tests();
    CHECK(r.ok);
    CHECK(r.symmetrization_max_rel < 1e-5);
    CHECK(r.roots_max_abs < 1e-10);
    CHECK(r.eigen_max_abs < 1e-6);
    CHECK_FALSE(r.lines.empty());
}
