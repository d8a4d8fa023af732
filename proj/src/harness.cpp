#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "combinatorics.hpp"
#include "rng.hpp"

namespace aztec {

using nlohmann::json;

namespace {

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Lln: return "lln";
        case ExperimentKind::Clt: return "clt";
        case ExperimentKind::Multilevel: return "multilevel";
    }
    return "?";
}

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

long long get_int(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) bad(std::string(key) + " must be an integer");
    return v.get<long long>();
}

std::uint64_t get_u64(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        bad(std::string(key) + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (M < 2) bad("M must be >= 2");
    if (levels.empty()) bad("levels must be nonempty");
    for (double a : levels)
        if (!(a > 0.0 && a < 1.0)) bad("every level must lie in (0,1)");
    for (int N : level_sizes())
        if (N < 1 || N >= M) bad("level gives N outside [1, M-1]; increase M");
    if (ks.empty()) bad("k must be nonempty");
    for (int k : ks)
        if (k < 1 || k > 8) bad("moment orders must lie in [1,8]");
    if (batches < 20) bad("batches must be >= 20");
    if (samples < 2 || samples < batches) bad("samples must be >= max(2, batches)");
    if ((kind == ExperimentKind::Clt || kind == ExperimentKind::Multilevel) && samples < 1000)
        bad("covariance experiments need samples >= 1000");
    if (kind == ExperimentKind::Multilevel) {
        if (levels.size() < 2) bad("multilevel needs at least two levels");
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (!(levels[i] > levels[i - 1])) bad("multilevel levels must be strictly increasing");
    }
    if (workers < 1) bad("workers must be >= 1");
    if (M < regime.min_admissible_M())
        bad("critical regime needs M >= " + std::to_string(regime.min_admissible_M()));
}

std::vector<int> ExperimentConfig::level_sizes() const {
    std::vector<int> out;
    for (double a : levels) out.push_back(static_cast<int>(std::floor(a * M + 1e-9)));
    return out;
}

json ExperimentConfig::to_json() const {
    return {{"experiment", kind_name(kind)},
            {"M", M},
            {"levels", levels},
            {"k", ks},
            {"samples", samples},
            {"mode", mode == LevelMode::Annealed ? "annealed" : "quenched"},
            {"regime", regime.to_json()},
            {"seed", master_seed},
            {"run", run},
            {"workers", workers},
            {"batches", batches},
            {"clt_form", clt_form == CltForm::ACarrying ? "a-carrying" : "literal"},
            {"out", out_dir}};
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("top level must be an object");
    static const std::set<std::string> allowed{"experiment", "M",       "levels",  "k",        "samples", "mode", "regime",
                                               "seed",       "run",     "workers", "batches",  "clt_form", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown key \"" + it.key() + "\"");
    for (const char* req : {"experiment", "M", "levels", "k", "samples", "regime"})
        if (!j.contains(req)) bad(std::string("missing key \"") + req + "\"");

    ExperimentConfig c;
    const json& e = j.at("experiment");
    if (!e.is_string()) bad("experiment must be a string");
    const std::string kind = e.get<std::string>();
    if (kind == "lln")
        c.kind = ExperimentKind::Lln;
    else if (kind == "clt")
        c.kind = ExperimentKind::Clt;
    else if (kind == "multilevel")
        c.kind = ExperimentKind::Multilevel;
    else
        bad("experiment must be lln, clt or multilevel");

    c.M = static_cast<int>(get_int(j, "M"));
    if (!j.at("levels").is_array()) bad("levels must be an array");
    c.levels.clear();
    for (const json& v : j.at("levels")) {
        if (!v.is_number()) bad("levels must be numbers");
        c.levels.push_back(v.get<double>());
    }
    if (!j.at("k").is_array()) bad("k must be an array");
    c.ks.clear();
    for (const json& v : j.at("k")) {
        if (!v.is_number_integer()) bad("k must hold integers");
        c.ks.push_back(v.get<int>());
    }
    c.samples = static_cast<int>(get_int(j, "samples"));
    if (j.contains("mode")) {
        const json& m = j.at("mode");
        if (!m.is_string()) bad("mode must be a string");
        if (m == "annealed")
            c.mode = LevelMode::Annealed;
        else if (m == "quenched")
            c.mode = LevelMode::Quenched;
        else
            bad("mode must be annealed or quenched");
    }
    c.regime = regime_from_json(j.at("regime"));
    if (j.contains("seed")) c.master_seed = get_u64(j, "seed");
    if (j.contains("run")) c.run = get_u64(j, "run");
    if (j.contains("workers")) c.workers = static_cast<int>(get_int(j, "workers"));
    if (j.contains("batches")) c.batches = static_cast<int>(get_int(j, "batches"));
    if (j.contains("clt_form")) {
        const json& f = j.at("clt_form");
        if (f == "a-carrying")
            c.clt_form = CltForm::ACarrying;
        else if (f == "literal")
            c.clt_form = CltForm::Literal;
        else
            bad("clt_form must be a-carrying or literal");
    }
    if (j.contains("out")) {
        if (!j.at("out").is_string()) bad("out must be a string");
        c.out_dir = j.at("out").get<std::string>();
    }
    c.validate();
    return c;
}

PowerSums draw_power_sums(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<int> Ns = cfg.level_sizes();
    PowerSums ps;
    ps.samples = cfg.samples;
    ps.columns = static_cast<int>(Ns.size() * cfg.ks.size());
    ps.values.assign(static_cast<std::size_t>(ps.samples) * ps.columns, 0.0);
    ps.seeds.resize(ps.samples);

    CreationTable quenched;
    if (cfg.mode == LevelMode::Quenched)
        quenched = reduce_weights_periodic(
            sample_environment(cfg.regime, cfg.M, mix_seed(cfg.master_seed, cfg.run, ~0ULL)).weights);

    auto one = [&](int i) {
        const std::uint64_t seed = mix_seed(cfg.master_seed, cfg.run, static_cast<std::uint64_t>(i));
        ps.seeds[i] = seed;
        SplitMix64 rng(seed);
        const auto lams =
            cfg.mode == LevelMode::Quenched
                ? shuffle_sample_levels(quenched, rng, Ns)
                : shuffle_sample_levels(reduce_weights_periodic(sample_environment(cfg.regime, cfg.M, seed).weights),
                                        rng, Ns);
        double* row = &ps.values[static_cast<std::size_t>(i) * ps.columns];
        for (std::size_t li = 0; li < Ns.size(); ++li)
            for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki)
                row[li * cfg.ks.size() + ki] = moments_pk_double(lams[li], cfg.ks[ki]);
    };

    const int W = std::max(1, std::min(cfg.workers, cfg.samples));
    std::vector<std::exception_ptr> errors(W);
    std::vector<int> failed_at(W, -1);
    auto work = [&](int w) {
        int i = w;
        try {
            for (; i < cfg.samples; i += W) one(i);
        } catch (...) {
            errors[w] = std::current_exception();
            failed_at[w] = i;
        }
    };
    if (W == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < W; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (int w = 0; w < W; ++w)
        if (errors[w]) {
            try {
                std::rethrow_exception(errors[w]);
            } catch (const std::exception& ex) {
                throw std::runtime_error("sample " + std::to_string(failed_at[w]) + ": " + ex.what());
            }
        }
    return ps;
}

double compensated_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

namespace {

double mean_of(const std::vector<double>& xs) { return compensated_sum(xs) / static_cast<double>(xs.size()); }

double cov_of(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean_of(xs), my = mean_of(ys);
    std::vector<double> prod(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx) * (ys[i] - my);
    return compensated_sum(prod) / static_cast<double>(xs.size() - 1);
}

std::vector<double> slice(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
    return {xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.begin() + static_cast<std::ptrdiff_t>(hi)};
}

double spread_error(const std::vector<double>& per_batch) {
    const double m = mean_of(per_batch);
    std::vector<double> sq(per_batch.size());
    for (std::size_t b = 0; b < per_batch.size(); ++b) sq[b] = (per_batch[b] - m) * (per_batch[b] - m);
    const double var = compensated_sum(sq) / static_cast<double>(per_batch.size() - 1);
    return std::sqrt(var / static_cast<double>(per_batch.size()));
}

}  // namespace

Estimate batch_mean(const std::vector<double>& xs, int batches) {
    const std::size_t n = xs.size();
    if (batches < 2 || n < static_cast<std::size_t>(batches)) throw std::invalid_argument("batch_mean: too few samples");
    std::vector<double> per(batches);
    for (int b = 0; b < batches; ++b) per[b] = mean_of(slice(xs, b * n / batches, (b + 1) * n / batches));
    return {mean_of(xs), spread_error(per)};
}

Estimate batch_covariance(const std::vector<double>& xs, const std::vector<double>& ys, int batches) {
    const std::size_t n = xs.size();
    if (ys.size() != n) throw std::invalid_argument("batch_covariance: length mismatch");
    if (batches < 2 || n < 2 * static_cast<std::size_t>(batches))
        throw std::invalid_argument("batch_covariance: too few samples");
    std::vector<double> per(batches);
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
        per[b] = cov_of(slice(xs, lo, hi), slice(ys, lo, hi));
    }
    return {cov_of(xs, ys), spread_error(per)};
}

namespace {

std::pair<double, double> central_moments_ratio(const std::vector<double>& xs, int p) {
    const double m = mean_of(xs);
    std::vector<double> m2(xs.size()), mp(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - m;
        m2[i] = d * d;
        mp[i] = std::pow(d, p);
    }
    return {compensated_sum(m2) / xs.size(), compensated_sum(mp) / xs.size()};
}

}  // namespace

double sample_skewness(const std::vector<double>& xs) {
    const auto [v, m3] = central_moments_ratio(xs, 3);
    return v > 0 ? m3 / std::pow(v, 1.5) : 0.0;
}

double sample_excess_kurtosis(const std::vector<double>& xs) {
    const auto [v, m4] = central_moments_ratio(xs, 4);
    return v > 0 ? m4 / (v * v) - 3.0 : 0.0;
}

double anderson_darling(std::vector<double> xs) {
    const std::size_t n = xs.size();
    if (n < 8) throw std::invalid_argument("anderson_darling: need at least 8 samples");
    const double m = mean_of(xs);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    const double sd = std::sqrt(compensated_sum(sq) / (n - 1));
    if (!(sd > 0)) return std::numeric_limits<double>::infinity();
    for (double& x : xs) x = (x - m) / sd;
    std::sort(xs.begin(), xs.end());
    auto logcdf = [](double z) { return std::log(std::max(0.5 * std::erfc(-z / std::sqrt(2.0)), 1e-300)); };
    auto logsf = [](double z) { return std::log(std::max(0.5 * std::erfc(z / std::sqrt(2.0)), 1e-300)); };
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = (2.0 * i + 1.0) * (logcdf(xs[i]) + logsf(xs[n - 1 - i]));
    const double a2 = -static_cast<double>(n) - compensated_sum(terms) / n;
    // small-sample correction for estimated mean and variance
    return a2 * (1.0 + 0.75 / n + 2.25 / (static_cast<double>(n) * n));
}

json RunManifest::to_json() const {
    return {{"config_hash", config_hash},
            {"code_version", code_version},
            {"seed_rule", seed_rule},
            {"sampling_seconds", sampling_seconds},
            {"total_seconds", total_seconds},
            {"outputs", outputs}};
}

json MomentReport::to_json() const {
    json rows_j = json::array();
    for (const MomentRow& r : rows)
        rows_j.push_back({{"quantity", r.quantity},
                          {"k", r.k},
                          {"l", r.l},
                          {"level1", r.level1},
                          {"level2", r.level2},
                          {"N1", r.N1},
                          {"N2", r.N2},
                          {"theory", num_or_null(r.theory)},
                          {"method", r.method},
                          {"empirical", num_or_null(r.empirical)},
                          {"stderr", num_or_null(r.stderr_)},
                          {"z", num_or_null(r.z)},
                          {"ratio", num_or_null(r.ratio)}});
    json norm = json::array();
    for (const NormalityRow& r : normality)
        norm.push_back({{"k", r.k},
                        {"level", r.level},
                        {"N", r.N},
                        {"skewness", num_or_null(r.skewness)},
                        {"excess_kurtosis", num_or_null(r.excess_kurtosis)},
                        {"anderson_darling", num_or_null(r.anderson_darling)}});
    json cfg = config.to_json();
    cfg.erase("workers");
    cfg.erase("out");
    return {{"experiment", experiment}, {"config", cfg}, {"config_hash", manifest.config_hash},
            {"rows", rows_j},           {"normality", norm}};
}

std::string MomentReport::csv() const {
    std::ostringstream os;
    os << "experiment,quantity,k,l,level1,level2,N1,N2,theory,method,empirical,stderr,z,ratio\n";
    for (const MomentRow& r : rows)
        os << experiment << ',' << r.quantity << ',' << r.k << ',' << r.l << ',' << fmt(r.level1) << ','
           << fmt(r.level2) << ',' << r.N1 << ',' << r.N2 << ',' << fmt(r.theory) << ',' << r.method << ','
           << fmt(r.empirical) << ',' << fmt(r.stderr_) << ',' << fmt(r.z) << ',' << fmt(r.ratio) << '\n';
    return os.str();
}

const MomentRow* MomentReport::find(const std::string& quantity, int k, int l, double level1, double level2) const {
    for (const MomentRow& r : rows)
        if (r.quantity == quantity && r.k == k && r.l == l && std::abs(r.level1 - level1) < 1e-12 &&
            std::abs(r.level2 - level2) < 1e-12)
            return &r;
    return nullptr;
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = cfg.to_json();
    j.erase("workers");
    j.erase("out");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MomentReport analyze(const ExperimentConfig& cfg, const PowerSums& ps) {
    MomentReport rep;
    rep.experiment = kind_name(cfg.kind);
    rep.config = cfg;
    rep.manifest.config_hash = config_hash(cfg);
    rep.manifest.seed_rule =
        "sample i uses seed = mix_seed(master, run, i); its environment draws from "
        "SplitMix64(finalize(seed ^ 0x5be0cd19137e2179)) and its shuffle from SplitMix64(seed); "
        "the quenched environment uses index 2^64-1";

    const std::vector<int> Ns = cfg.level_sizes();
    const std::size_t K = cfg.ks.size();
    const bool critical = cfg.regime.regime == RegimeSpec::Regime::Critical;
    const WeightDistribution limit = cfg.regime.limit_law();
    const double finite_mean = cfg.regime.law_at(cfg.M).mean();
    auto column = [&](std::size_t li, std::size_t ki, double scale) {
        std::vector<double> xs(ps.samples);
        for (int i = 0; i < ps.samples; ++i) xs[i] = ps.at(i, static_cast<int>(li * K + ki)) / scale;
        return xs;
    };
    auto finish = [](MomentRow& r) {
        r.z = (r.empirical - r.theory) / r.stderr_;
        r.ratio = r.empirical / r.theory;
    };

    // slice means p_k / N^(k+1)
    for (std::size_t li = 0; li < Ns.size(); ++li) {
        const int N = Ns[li];
        const double a = static_cast<double>(cfg.M - N) / N;
        const ModelParams mp = ModelParams::from_a(a, limit);
        for (std::size_t ki = 0; ki < K; ++ki) {
            const int k = cfg.ks[ki];
            const Estimate e = batch_mean(column(li, ki, ipow(N, k + 1)), cfg.batches);
            MomentRow r{"mean", k, 0, cfg.levels[li], cfg.levels[li], N, N, lln_moment_contour(k, mp), "contour",
                        e.value, e.stderr_};
            finish(r);
            rep.rows.push_back(r);
            if (k == 1) {
                // E p_1 = N(M-N) E b + N(N-1)/2 holds exactly at every size
                MomentRow f{"mean_finite_n", 1, 0, cfg.levels[li], cfg.levels[li], N, N,
                            0.5 - 0.5 / N + a * finite_mean, "exact-finite-N", e.value, e.stderr_};
                finish(f);
                rep.rows.push_back(f);
            }
        }
    }
    if (cfg.kind == ExperimentKind::Lln) return rep;

    // covariances; fixed regime at scale N^(k+l+1), critical at M^(k+l)
    auto scale_for = [&](int N, int k) { return critical ? ipow(cfg.M, k) : std::pow(N, k + 0.5); };
    for (std::size_t li = 0; li < Ns.size(); ++li)
        for (std::size_t lj = li; lj < Ns.size(); ++lj) {
            if (lj != li && cfg.kind != ExperimentKind::Multilevel) continue;
            const int N1 = Ns[li], N2 = Ns[lj];
            for (std::size_t ki = 0; ki < K; ++ki)
                for (std::size_t kj = (li == lj ? ki : 0); kj < K; ++kj) {
                    const int k = cfg.ks[ki], l = cfg.ks[kj];
                    const Estimate e = batch_covariance(column(li, ki, scale_for(N1, k)),
                                                        column(lj, kj, scale_for(N2, l)), cfg.batches);
                    MomentRow r{"cov", k, l, cfg.levels[li], cfg.levels[lj], N1, N2, 0.0, "", e.value, e.stderr_};
                    if (critical) {
                        r.theory = clt_cov_critical(k, l, static_cast<double>(N1) / cfg.M,
                                                    static_cast<double>(N2) / cfg.M, cfg.regime.beta, cfg.regime.sigma);
                        r.method = "contour-critical";
                    } else if (li == lj) {
                        const double a = static_cast<double>(cfg.M - N1) / N1;
                        r.theory = clt_cov_fixed(k, l, ModelParams::from_a(a, limit), cfg.clt_form);
                        r.method = cfg.clt_form == CltForm::ACarrying ? "contour-a-carrying" : "contour-literal";
                    } else {
                        r.theory = std::numeric_limits<double>::quiet_NaN();
                        r.method = "unavailable";
                    }
                    finish(r);
                    rep.rows.push_back(r);
                }
        }
    for (std::size_t li = 0; li < Ns.size(); ++li)
        for (std::size_t ki = 0; ki < K; ++ki) {
            const std::vector<double> xs = column(li, ki, scale_for(Ns[li], cfg.ks[ki]));
            rep.normality.push_back({cfg.ks[ki], cfg.levels[li], Ns[li], sample_skewness(xs),
                                     sample_excess_kurtosis(xs), anderson_darling(xs)});
        }
    return rep;
}

namespace {

MomentReport timed_run(const ExperimentConfig& cfg, ExperimentKind kind) {
    ExperimentConfig c = cfg;
    c.kind = kind;
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const PowerSums ps = draw_power_sums(c);
    const auto t1 = std::chrono::steady_clock::now();
    MomentReport rep = analyze(c, ps);
    rep.manifest.sampling_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (!c.out_dir.empty()) write_outputs(rep, ps);
    rep.manifest.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.out_dir.empty()) {
        std::ofstream(std::filesystem::path(c.out_dir) / "manifest.json") << rep.manifest.to_json().dump(2) << '\n';
    }
    return rep;
}

}  // namespace

MomentReport run_lln_experiment(const ExperimentConfig& cfg) { return timed_run(cfg, ExperimentKind::Lln); }
MomentReport run_clt_experiment(const ExperimentConfig& cfg) { return timed_run(cfg, ExperimentKind::Clt); }
MomentReport run_multilevel_experiment(const ExperimentConfig& cfg) {
    return timed_run(cfg, ExperimentKind::Multilevel);
}
MomentReport run_experiment(const ExperimentConfig& cfg) { return timed_run(cfg, cfg.kind); }

void write_outputs(MomentReport& report, const PowerSums& ps) {
    const std::filesystem::path dir(report.config.out_dir);
    std::filesystem::create_directories(dir);
    report.manifest.outputs = {"report.json", "report.csv", "samples.csv", "manifest.json"};
    std::ofstream(dir / "report.json") << report.to_json().dump(2) << '\n';
    std::ofstream(dir / "report.csv") << report.csv();

    std::ofstream s(dir / "samples.csv");
    s << "sample,seed";
    const std::vector<int> Ns = report.config.level_sizes();
    for (int N : Ns)
        for (int k : report.config.ks) s << ",p" << k << "_N" << N;
    s << '\n';
    for (int i = 0; i < ps.samples; ++i) {
        s << i << ',' << ps.seeds[i];
        for (int c = 0; c < ps.columns; ++c) s << ',' << fmt(ps.at(i, c));
        s << '\n';
    }
    std::ofstream(dir / "manifest.json") << report.manifest.to_json().dump(2) << '\n';
}

}  // namespace aztec
