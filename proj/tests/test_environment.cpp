#include <doctest.h>

#include <cmath>

#include "environment.hpp"
#include "rng.hpp"

using namespace aztec;
using nlohmann::json;

TEST_CASE("laws of b and their moments") {
    const auto pm = WeightDistribution::point_mass(0.5);
    CHECK(pm.mean() == 0.5);
    CHECK(pm.variance() == 0.0);
    CHECK(pm.is_degenerate());

    const auto bern = WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5});
    REQUIRE(bern.nodes().size() == 2);
    CHECK(bern.nodes()[0] == doctest::Approx(1.0 / 3));
    CHECK(bern.nodes()[1] == doctest::Approx(5.0 / 6));
    CHECK(bern.mean() == doctest::Approx(7.0 / 12));
    CHECK(bern.variance() == doctest::Approx(1.0 / 16));

    // E[W/(1+W)] for W uniform on [0,2] is 1 - log(3)/2
    const auto uw = WeightDistribution::uniform_on_w(0.0, 2.0);
    CHECK(uw.mean() == doctest::Approx(1.0 - std::log(3.0) / 2).epsilon(1e-12));
    const auto ub = WeightDistribution::uniform_on_b(0.2, 0.6);
    CHECK(ub.mean() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(ub.variance() == doctest::Approx(0.16 / 12).epsilon(1e-10));

    const auto two = WeightDistribution::two_point(0.5, 0.2);
    CHECK(two.mean() == doctest::Approx(0.5));
    CHECK(two.variance() == doctest::Approx(0.04));
}

TEST_CASE("resolvent expectations agree with node sums") {
    const auto d = WeightDistribution::discrete({0.2, 0.7, 0.9}, {0.5, 0.3, 0.2});
    const cplx z(0.3, 0.4);
    cplx direct = 0.0;
    for (std::size_t j = 0; j < d.nodes().size(); ++j) {
        const double b = d.nodes()[j];
        direct += d.masses()[j] * b / (1.0 - b + b * z);
    }
    CHECK(std::abs(d.expect_resolvent(z) - direct) < 1e-14);
    CHECK(std::abs(d.expect_linear(cplx(2.0, 0.0)) - (1.0 + d.mean())) < 1e-14);
}

TEST_CASE("invalid laws are rejected") {
    CHECK_THROWS_AS(WeightDistribution::point_mass(1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::point_mass(0.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::discrete({0.2, 0.3}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::uniform_on_w(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::uniform_on_w(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::uniform_on_b(0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightDistribution::two_point(0.5, 0.5), std::invalid_argument);
}

TEST_CASE("JSON and shorthand parsing is strict and roundtrips") {
    for (const auto& d : {WeightDistribution::point_mass(0.25), WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5}),
                          WeightDistribution::uniform_on_w(0.0, 2.0, 32), WeightDistribution::uniform_on_b(0.1, 0.4)}) {
        const auto back = distribution_from_json(d.to_json());
        CHECK(back.mean() == doctest::Approx(d.mean()).epsilon(1e-14));
        CHECK(back.variance() == doctest::Approx(d.variance()).epsilon(1e-12));
    }
    CHECK_THROWS_AS(distribution_from_json(json{{"kind", "point_mass"}, {"b", 0.5}, {"extra", 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(distribution_from_json(json{{"kind", "gamma"}}), std::invalid_argument);
    CHECK_THROWS_AS(regime_from_json(json{{"regime", "critical"}, {"beta", 0.5}}), std::invalid_argument);
    const auto r = regime_from_json(json{{"regime", "critical"}, {"beta", 0.5}, {"sigma", 1.0}});
    CHECK(r.regime == RegimeSpec::Regime::Critical);

    CHECK(distribution_from_shorthand("point:0.5").mean() == 0.5);
    CHECK(distribution_from_shorthand("discreteW:0.5@0.5,5@0.5").variance() == doctest::Approx(1.0 / 16));
    CHECK(distribution_from_shorthand("uniformW:0,2").mean() == doctest::Approx(1.0 - std::log(3.0) / 2));
    CHECK_THROWS_AS(distribution_from_shorthand("point"), std::invalid_argument);
    CHECK_THROWS_AS(distribution_from_shorthand("point:abc"), std::invalid_argument);
}

TEST_CASE("critical regime shrinks the spread as 1/sqrt(M)") {
    const auto r = RegimeSpec::critical(0.5, 1.0);
    // 1/sqrt(M) < 1/2 needs M >= 5
    CHECK(r.min_admissible_M() == 5);
    CHECK_THROWS_AS(r.law_at(4), std::invalid_argument);
    const auto law = r.law_at(100);
    CHECK(law.variance() == doctest::Approx(0.01));
    CHECK(law.mean() == doctest::Approx(0.5));
    CHECK(r.limit_law().is_degenerate());
    CHECK(RegimeSpec::fixed(WeightDistribution::point_mass(0.3)).min_admissible_M() == 1);
}

TEST_CASE("environment samples are seeded and follow the law") {
    const auto spec = RegimeSpec::fixed(WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5}));
    const auto a = sample_environment(spec, 50, 9), b = sample_environment(spec, 50, 9);
    CHECK(a.betas == b.betas);
    CHECK(a.betas != sample_environment(spec, 50, 10).betas);
    for (std::size_t i = 0; i < a.betas.size(); ++i)
        CHECK(a.weights[i] == doctest::Approx(a.betas[i] / (1 - a.betas[i])));

    // 4-sigma band on the empirical mean of 20000 draws
    const auto uw = RegimeSpec::fixed(WeightDistribution::uniform_on_w(0.0, 2.0));
    const auto env = sample_environment(uw, 20000, 123);
    double s = 0;
    for (double x : env.betas) s += x;
    const double mean = s / env.betas.size();
    const double se = std::sqrt(uw.dist.variance() / env.betas.size());
    CHECK(std::abs(mean - uw.dist.mean()) < 4 * se);

    const auto env2 = environment_from_betas({0.25, 0.5});
    CHECK(env2.weights[0] == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(environment_from_betas({1.0}), std::invalid_argument);
}

TEST_CASE("seed derivation separates runs and indices") {
    CHECK(mix_seed(1, 0, 0) != mix_seed(1, 0, 1));
    CHECK(mix_seed(1, 0, 0) != mix_seed(1, 1, 0));
    CHECK(mix_seed(1, 0, 0) != mix_seed(2, 0, 0));
    CHECK(mix_seed(5, 3, 7) == mix_seed(5, 3, 7));
    SplitMix64 r(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}
