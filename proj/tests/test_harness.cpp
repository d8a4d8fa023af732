#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "harness.hpp"

using namespace aztec;
using nlohmann::json;

namespace {

json base_config() {
    return json{{"experiment", "lln"},
                {"M", 24},
                {"levels", {0.5}},
                {"k", {1, 2}},
                {"samples", 200},
                {"regime", {{"regime", "fixed"}, {"dist", {{"kind", "point_mass"}, {"b", 0.5}}}}},
                {"seed", 11}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing is strict") {
    CHECK_NOTHROW(config_from_json(base_config()));
    auto j = base_config();
    j["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j.erase("M");
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["M"] = 24.5;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["levels"] = {1.0};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["k"] = {9};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["batches"] = 10;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["experiment"] = "clt";
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);  // needs >= 1000 samples
    j["samples"] = 1000;
    CHECK_NOTHROW(config_from_json(j));
    j["experiment"] = "multilevel";
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);  // one level
    j["levels"] = {0.6, 0.3};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j["levels"] = {0.3, 0.6};
    CHECK_NOTHROW(config_from_json(j));
    j = base_config();
    j["regime"] = {{"regime", "critical"}, {"beta", 0.5}, {"sigma", 1.0}};
    j["M"] = 4;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j["M"] = 5;
    CHECK_NOTHROW(config_from_json(j));
    j = base_config();
    j["mode"] = "sometimes";
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j = base_config();
    j["seed"] = -3;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("compensated summation and batch statistics") {
    CHECK(compensated_sum({1e16, 1.0, -1e16}) == 1.0);
    std::vector<double> xs(100);
    for (int i = 0; i < 100; ++i) xs[i] = i;
    const Estimate m = batch_mean(xs, 20);
    CHECK(m.value == doctest::Approx(49.5));
    CHECK(m.stderr_ == doctest::Approx(5 * std::sqrt(35.0) / std::sqrt(20.0)).epsilon(1e-12));

    std::mt19937_64 g(5);
    std::normal_distribution<double> nd;
    std::vector<double> a(4000), b(4000);
    for (int i = 0; i < 4000; ++i) {
        a[i] = nd(g);
        b[i] = 0.5 * a[i] + nd(g);
    }
    const Estimate ab = batch_covariance(a, b, 40), ba = batch_covariance(b, a, 40);
    CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-12));
    CHECK(std::abs(ab.value - 0.5) < 4 * ab.stderr_);
    CHECK(std::abs(sample_skewness(a)) < 0.2);
    CHECK(std::abs(sample_excess_kurtosis(a)) < 0.3);
    CHECK(anderson_darling(a) < 1.0);

    std::vector<double> e(4000);
    std::exponential_distribution<double> ed;
    for (double& x : e) x = ed(g);
    CHECK(sample_skewness(e) > 1.5);
    CHECK(anderson_darling(e) > 10.0);
}

TEST_CASE("standard errors shrink like 1/sqrt(n)") {
    auto j = base_config();
    j["M"] = 16;
    j["k"] = {1};
    j["batches"] = 200;
    j["samples"] = 4000;
    const auto small = run_experiment(config_from_json(j));
    j["samples"] = 16000;
    const auto large = run_experiment(config_from_json(j));
    const double ratio = small.find("mean", 1, 0, 0.5, 0.5)->stderr_ / large.find("mean", 1, 0, 0.5, 0.5)->stderr_;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.5);
}

TEST_CASE("the exact finite-N mean row is unbiased") {
    for (const char* dist : {"point", "bern"}) {
        auto j = base_config();
        j["M"] = 32;
        j["samples"] = 600;
        if (std::string(dist) == "bern")
            j["regime"]["dist"] = json{{"kind", "discrete"}, {"w_atoms", {{0.5, 0.5}, {5.0, 0.5}}}};
        const auto rep = run_experiment(config_from_json(j));
        const MomentRow* f = rep.find("mean_finite_n", 1, 0, 0.5, 0.5);
        REQUIRE(f != nullptr);
        CHECK(f->method == "exact-finite-N");
        CHECK(std::abs(f->z) < 4.0);
    }
}

TEST_CASE("outputs are reproducible across worker counts") {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "aztecenv_harness_test";
    fs::remove_all(root);
    auto j = base_config();
    j["experiment"] = "clt";
    j["samples"] = 1000;
    std::string first_json, first_csv, first_samples;
    for (int w : {1, 3}) {
        auto cfg = config_from_json(j);
        cfg.workers = w;
        cfg.out_dir = (root / ("w" + std::to_string(w))).string();
        const auto rep = run_experiment(cfg);
        CHECK(rep.manifest.config_hash == config_hash(config_from_json(j)));
        for (const char* f : {"report.json", "report.csv", "samples.csv", "manifest.json"})
            CHECK(fs::exists(fs::path(cfg.out_dir) / f));
        const std::string rj = slurp(fs::path(cfg.out_dir) / "report.json");
        const std::string rc = slurp(fs::path(cfg.out_dir) / "report.csv");
        const std::string sc = slurp(fs::path(cfg.out_dir) / "samples.csv");
        if (w == 1) {
            first_json = rj;
            first_csv = rc;
            first_samples = sc;
        } else {
            CHECK(rj == first_json);
            CHECK(rc == first_csv);
            CHECK(sc == first_samples);
        }
    }
    CHECK(first_csv.rfind("experiment,quantity,k,l,level1,level2,N1,N2,theory,method,empirical,stderr,z,ratio\n", 0) ==
          0);
    CHECK(first_samples.rfind("sample,seed,p1_N12,p2_N12\n", 0) == 0);
    fs::remove_all(root);

    auto c2 = config_from_json(j);
    c2.master_seed = 12;
    CHECK(config_hash(c2) != config_hash(config_from_json(j)));
}

TEST_CASE("multilevel rows cover every pair of levels") {
    auto j = base_config();
    j["experiment"] = "multilevel";
    j["samples"] = 1000;
    j["M"] = 30;
    j["levels"] = {1.0 / 3, 2.0 / 3};
    j["k"] = {1};
    j["regime"] = {{"regime", "critical"}, {"beta", 0.5}, {"sigma", 1.0}};
    const auto rep = run_experiment(config_from_json(j));
    const MomentRow* cross = rep.find("cov", 1, 1, 1.0 / 3, 2.0 / 3);
    REQUIRE(cross != nullptr);
    CHECK(cross->method == "contour-critical");
    CHECK(cross->N1 == 10);
    CHECK(cross->N2 == 20);
    CHECK(std::isfinite(cross->theory));
    CHECK(rep.normality.size() == 2);

    j["regime"] = {{"regime", "fixed"}, {"dist", {{"kind", "point_mass"}, {"b", 0.5}}}};
    const auto fixed = run_experiment(config_from_json(j));
    const MomentRow* un = fixed.find("cov", 1, 1, 1.0 / 3, 2.0 / 3);
    REQUIRE(un != nullptr);
    CHECK(un->method == "unavailable");
    const json rj = fixed.to_json();
    bool saw_null = false;
    for (const auto& r : rj.at("rows"))
        if (r.at("method") == "unavailable") saw_null = r.at("theory").is_null();
    CHECK(saw_null);
}
