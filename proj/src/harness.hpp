#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "environment.hpp"
#include "sampler.hpp"

namespace aztec {

inline constexpr const char* kCodeVersion = "aztecenv 1.0.0";

enum class ExperimentKind { Lln, Clt, Multilevel };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Lln;
    int M = 64;
    std::vector<double> levels{0.5};  // alpha values; N = floor(alpha M)
    std::vector<int> ks{1};
    int samples = 200;
    LevelMode mode = LevelMode::Annealed;
    RegimeSpec regime;
    std::uint64_t master_seed = 1;
    std::uint64_t run = 0;
    int workers = 1;
    int batches = 20;
    CltForm clt_form = CltForm::ACarrying;
    std::string out_dir;  // empty: nothing written

    // throws std::invalid_argument
    void validate() const;
    std::vector<int> level_sizes() const;
    nlohmann::json to_json() const;
};

// Strict: unknown keys and wrong types are rejected with std::invalid_argument.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Per-sample power sums p_k(λ^(N)) for every (level, k); row i is sample i,
// column level_index * ks.size() + k_index.
struct PowerSums {
    int samples = 0;
    int columns = 0;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;

    double at(int i, int c) const { return values[static_cast<std::size_t>(i) * columns + c]; }
};
PowerSums draw_power_sums(const ExperimentConfig& cfg);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Neumaier-compensated sum, in index order
double compensated_sum(const std::vector<double>& xs);
Estimate batch_mean(const std::vector<double>& xs, int batches);
Estimate batch_covariance(const std::vector<double>& xs, const std::vector<double>& ys, int batches);
double sample_skewness(const std::vector<double>& xs);
double sample_excess_kurtosis(const std::vector<double>& xs);
// A² against a normal with estimated mean and variance
double anderson_darling(std::vector<double> xs);

struct MomentRow {
    std::string quantity;  // "mean" or "cov"
    int k = 0, l = 0;
    double level1 = 0, level2 = 0;
    int N1 = 0, N2 = 0;
    double theory = 0;
    std::string method;
    double empirical = 0, stderr_ = 0, z = 0, ratio = 0;
};

struct NormalityRow {
    int k = 0;
    double level = 0;
    int N = 0;
    double skewness = 0, excess_kurtosis = 0, anderson_darling = 0;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version = kCodeVersion;
    std::string seed_rule;
    double sampling_seconds = 0, total_seconds = 0;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

struct MomentReport {
    std::string experiment;
    ExperimentConfig config;
    std::vector<MomentRow> rows;
    std::vector<NormalityRow> normality;
    RunManifest manifest;

    // timings live only in the manifest, so this is reproducible
    nlohmann::json to_json() const;
    std::string csv() const;
    const MomentRow* find(const std::string& quantity, int k, int l, double level1, double level2) const;
};

MomentReport run_lln_experiment(const ExperimentConfig& cfg);
MomentReport run_clt_experiment(const ExperimentConfig& cfg);
MomentReport run_multilevel_experiment(const ExperimentConfig& cfg);
MomentReport run_experiment(const ExperimentConfig& cfg);

// Analysis of already drawn samples (the run_* functions draw and then call this).
MomentReport analyze(const ExperimentConfig& cfg, const PowerSums& ps);

// report.json, report.csv, samples.csv, manifest.json under cfg.out_dir
void write_outputs(MomentReport& report, const PowerSums& ps);

std::string config_hash(const ExperimentConfig& cfg);

}  // namespace aztec
