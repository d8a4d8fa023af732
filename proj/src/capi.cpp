#include "aztecenv/aztecenv.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "analytic.hpp"
#include "aztec.hpp"
#include "checks.hpp"
#include "environment.hpp"
#include "harness.hpp"
#include "sampler.hpp"

struct az_regime {
    aztec::RegimeSpec spec;
};
struct az_tiling {
    aztec::Tiling t;
};
struct az_report {
    aztec::MomentReport r;
};

namespace {

thread_local std::string g_error;

az_status fail(az_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

template <class F>
az_status guard(F&& f) {
    g_error.clear();
    try {
        f();
        return AZ_OK;
    } catch (const aztec::ToleranceError& e) {
        return fail(AZ_ERR_TOLERANCE, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(AZ_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(AZ_ERR_OUT_OF_MEMORY, "out of memory");
    } catch (const std::invalid_argument& e) {
        return fail(AZ_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(AZ_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(AZ_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(AZ_ERR_INVALID_ARGUMENT, std::string("json: ") + e.what());
    } catch (const std::exception& e) {
        return fail(AZ_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(AZ_ERR_RUNTIME, "unknown error");
    }
}

void need(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

aztec::WeightDistribution parse_dist(const char* spec) {
    need(spec != nullptr, "distribution spec is NULL");
    const std::string s(spec);
    if (!s.empty() && s[0] == '{') return aztec::distribution_from_json(nlohmann::json::parse(s));
    return aztec::distribution_from_shorthand(s);
}

aztec::RegimeSpec parse_regime(const char* spec) {
    need(spec != nullptr, "regime spec is NULL");
    const std::string s(spec);
    if (!s.empty() && s[0] == '{') {
        const auto j = nlohmann::json::parse(s);
        if (j.is_object() && j.contains("regime")) return aztec::regime_from_json(j);
        return aztec::RegimeSpec::fixed(aztec::distribution_from_json(j));
    }
    if (s.rfind("critical:", 0) == 0) {
        const std::string rest = s.substr(9);
        const auto comma = rest.find(',');
        need(comma != std::string::npos, "critical spec: expected critical:beta,sigma");
        std::size_t u1 = 0, u2 = 0;
        const std::string b = rest.substr(0, comma), g = rest.substr(comma + 1);
        double beta = 0, sigma = 0;
        try {
            beta = std::stod(b, &u1);
            sigma = std::stod(g, &u2);
        } catch (const std::exception&) {
            u1 = 0;
        }
        need(u1 == b.size() && u2 == g.size() && u1 > 0, "critical spec: bad number");
        return aztec::RegimeSpec::critical(beta, sigma);
    }
    return aztec::RegimeSpec::fixed(aztec::distribution_from_shorthand(s));
}

// len counts records of `stride` values
template <class T>
void copy_out(const std::vector<T>& v, T* out, size_t cap, size_t* len, size_t stride = 1) {
    need(len != nullptr, "length out-parameter is NULL");
    *len = v.size() / stride;
    if (cap < *len) throw std::length_error("buffer too small");
    if (!v.empty()) {
        need(out != nullptr, "output buffer is NULL");
        std::memcpy(out, v.data(), v.size() * sizeof(T));
    }
}

}  // namespace

#define AZ_GUARD_SIZED(body)                                                  \
    do {                                                                      \
        g_error.clear();                                                      \
        try {                                                                 \
            body;                                                             \
        } catch (const std::length_error& e) {                                \
            return fail(AZ_ERR_BUFFER_TOO_SMALL, e.what());                   \
        } catch (...) {                                                       \
            return guard([] { throw; });                                      \
        }                                                                     \
        return AZ_OK;                                                         \
    } while (0)

extern "C" {

const char* az_version(void) { return aztec::kCodeVersion; }
const char* az_last_error(void) { return g_error.c_str(); }
void az_string_free(char* s) { std::free(s); }
void az_bytes_free(uint8_t* b) { std::free(b); }

az_status az_regime_parse(const char* spec, az_regime** out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        *out = new az_regime{parse_regime(spec)};
    });
}

void az_regime_free(az_regime* r) { delete r; }

az_status az_regime_describe(const az_regime* r, char** json_out) {
    return guard([&] {
        need(r && json_out, "NULL argument");
        *json_out = dup_string(r->spec.to_json().dump());
    });
}

az_status az_regime_min_M(const az_regime* r, int* out) {
    return guard([&] {
        need(r && out, "NULL argument");
        *out = r->spec.min_admissible_M();
    });
}

az_status az_environment_sample(const az_regime* r, int M, uint64_t seed, double* betas, double* weights) {
    return guard([&] {
        need(r != nullptr, "regime is NULL");
        need(M >= 1, "M must be >= 1");
        const auto env = aztec::sample_environment(r->spec, M, seed);
        if (betas) std::memcpy(betas, env.betas.data(), sizeof(double) * M);
        if (weights) std::memcpy(weights, env.weights.data(), sizeof(double) * M);
    });
}

az_status az_tiling_shuffle(const double* weights, int M, uint64_t seed, az_tiling** out) {
    return guard([&] {
        need(weights && out, "NULL argument");
        need(M >= 1, "M must be >= 1");
        *out = new az_tiling{aztec::shuffle_sample(std::vector<double>(weights, weights + M), seed)};
    });
}

az_status az_tiling_chain(const double* betas, int M, uint64_t seed, az_tiling** out) {
    return guard([&] {
        need(betas && out, "NULL argument");
        need(M >= 1 && M <= aztec::kChainMaxM, "chain sampler needs 1 <= M <= 12");
        const auto seq = aztec::chain_sample(std::vector<double>(betas, betas + M), seed);
        *out = new az_tiling{aztec::signatures_to_tiling(seq)};
    });
}

az_status az_tiling_sample(const az_regime* r, int M, uint64_t seed, az_tiling** out) {
    return guard([&] {
        need(r && out, "NULL argument");
        need(M >= 1, "M must be >= 1");
        const auto env = aztec::sample_environment(r->spec, M, seed);
        aztec::SplitMix64 rng(seed);
        *out = new az_tiling{aztec::shuffle_sample(aztec::reduce_weights_periodic(env.weights), rng)};
    });
}

uint64_t az_sample_seed(uint64_t master, uint64_t run, uint64_t index) { return aztec::mix_seed(master, run, index); }

void az_tiling_free(az_tiling* t) { delete t; }

int az_tiling_M(const az_tiling* t) { return t ? t->t.M : -1; }

az_status az_tiling_dominos(const az_tiling* t, int* xyo, size_t cap, size_t* len) {
    AZ_GUARD_SIZED({
        need(t != nullptr, "tiling is NULL");
        std::vector<int> flat;
        for (const auto& d : t->t.dominos) {
            flat.push_back(d.x);
            flat.push_back(d.y);
            flat.push_back(static_cast<int>(d.orient));
        }
        copy_out(flat, xyo, cap, len, 3);
    });
}

az_status az_tiling_signature(const az_tiling* t, int level, int* out, size_t cap, size_t* len) {
    AZ_GUARD_SIZED({
        need(t != nullptr, "tiling is NULL");
        need(level >= 0 && level <= t->t.M, "level must lie in [0, M]");
        copy_out(aztec::level_signature(t->t, level), out, cap, len);
    });
}

az_status az_tiling_encode(const az_tiling* t, uint8_t* buf, size_t cap, size_t* len) {
    AZ_GUARD_SIZED({
        need(t != nullptr, "tiling is NULL");
        copy_out(aztec::encode_binary(t->t), buf, cap, len);
    });
}

az_status az_tiling_decode(const uint8_t* buf, size_t len, az_tiling** out) {
    return guard([&] {
        need(buf && out, "NULL argument");
        *out = new az_tiling{aztec::decode_binary(std::vector<std::uint8_t>(buf, buf + len))};
    });
}

az_status az_tiling_svg(const az_tiling* t, int palette, double cell_px, char** out) {
    return guard([&] {
        need(t && out, "NULL argument");
        need(palette == 0 || palette == 1, "palette must be 0 or 1");
        need(cell_px > 0, "cell size must be positive");
        *out = dup_string(aztec::render_svg(
            t->t, palette == 0 ? aztec::Palette::FourColor : aztec::Palette::EightShade, cell_px));
    });
}

az_status az_tiling_height_pgm(const az_tiling* t, uint8_t** out, size_t* len) {
    return guard([&] {
        need(t && out && len, "NULL argument");
        const std::string pgm = aztec::height_pgm(aztec::height_function(t->t));
        auto* p = static_cast<uint8_t*>(std::malloc(pgm.size()));
        if (!p) throw std::bad_alloc();
        std::memcpy(p, pgm.data(), pgm.size());
        *out = p;
        *len = pgm.size();
    });
}

az_status az_enumerate_verify(int M, const char* const* weights, long long* tilings, long long* verified, int* ok,
                              char** details) {
    return guard([&] {
        std::vector<aztec::Rational> w;
        if (weights) {
            for (int t = 0; t < M; ++t) {
                need(weights[t] != nullptr, "weight string is NULL");
                w.push_back(aztec::parse_rational(weights[t]));
            }
        } else {
            need(M >= 1, "M must be >= 1");
            w = aztec::default_enumeration_weights(M);
        }
        const auto rep = aztec::verify_enumeration(M, w);
        if (tilings) *tilings = rep.tilings;
        if (verified) *verified = rep.verified;
        if (ok) *ok = rep.ok() ? 1 : 0;
        if (details) {
            std::string s = "M=" + std::to_string(M) + " W=(";
            for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + w[i].get_str();
            s += ")\n";
            s += std::string("tiling count 2^(M(M+1)/2): ") + (rep.count_ok ? "ok" : "FAIL") + "\n";
            s += std::string("partition function product formula: ") + (rep.partition_ok ? "ok" : "FAIL") + "\n";
            s += std::string("shuffling output law: ") + (rep.shuffle_law_ok ? "ok" : "FAIL") + "\n";
            for (const auto& f : rep.failures) s += f + "\n";
            *details = dup_string(s);
        }
    });
}

az_status az_selfcheck(uint64_t seed, int* ok, char** details) {
    return guard([&] {
        const auto rep = aztec::selfcheck(seed);
        if (ok) *ok = rep.ok() ? 1 : 0;
        if (details) {
            std::string s;
            char buf[64];
            for (const auto& l : rep.lines) {
                std::snprintf(buf, sizeof buf, " err=%.3e tol=%.0e", l.error, l.tolerance);
                s += std::string(l.ok ? "PASS " : "FAIL ") + l.name + buf + "\n";
            }
            *details = dup_string(s);
        }
    });
}

az_status az_lln_moment(const char* dist, double alpha, int k, int method, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        need(method == 0 || method == 1, "method must be 0 (contour) or 1 (jets)");
        const auto p = aztec::ModelParams::from_alpha(alpha, parse_dist(dist));
        *out = method == 0 ? aztec::lln_moment_contour(k, p) : aztec::lln_moment_general(k, aztec::schur_family(p.a, p.dist));
    });
}

az_status az_free_cumulants(const char* dist, double alpha, int kmax, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        const auto c = aztec::free_cumulants(kmax, aztec::ModelParams::from_alpha(alpha, parse_dist(dist)));
        std::memcpy(out, c.data(), sizeof(double) * c.size());
    });
}

az_status az_limit_shape_point(const char* dist, double alpha, double y, double* density, double* re_z, double* im_z,
                               int* liquid, int* upper_roots) {
    return guard([&] {
        const auto pt = aztec::limit_shape_density(alpha, y, parse_dist(dist));
        if (density) *density = pt.density;
        if (re_z) *re_z = pt.z.real();
        if (im_z) *im_z = pt.z.imag();
        if (liquid) *liquid = pt.liquid ? 1 : 0;
        if (upper_roots) *upper_roots = pt.upper_roots;
    });
}

az_status az_limit_shape_grid(const char* dist, int n, int workers, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        const auto g = aztec::limit_shape_grid(parse_dist(dist), n, workers);
        for (std::size_t i = 0; i < g.points.size(); ++i) {
            const auto& p = g.points[i];
            double* row = out + 5 * i;
            row[0] = p.alpha;
            row[1] = p.y;
            row[2] = p.z.real();
            row[3] = p.z.imag();
            row[4] = p.density;
        }
    });
}

az_status az_arctic_curve(const char* dist, int n_points, double* out, size_t cap, size_t* len) {
    AZ_GUARD_SIZED({
        std::vector<double> flat;
        for (const auto& p : aztec::arctic_curve(parse_dist(dist), n_points)) {
            flat.push_back(p.alpha);
            flat.push_back(p.y);
        }
        copy_out(flat, out, cap, len, 2);
    });
}

az_status az_clt_cov_fixed(const char* dist, double alpha, int k, int l, int form, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        need(form == 0 || form == 1, "form must be 0 (a-carrying) or 1 (literal)");
        *out = aztec::clt_cov_fixed(k, l, aztec::ModelParams::from_alpha(alpha, parse_dist(dist)),
                                    form == 0 ? aztec::CltForm::ACarrying : aztec::CltForm::Literal);
    });
}

az_status az_clt_cov_jets(const char* dist, double alpha, int k, int l, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        const auto p = aztec::ModelParams::from_alpha(alpha, parse_dist(dist));
        *out = aztec::clt_cov_general(k, l, aztec::schur_family(p.a, p.dist));
    });
}

az_status az_clt_cov_critical(int k1, int k2, double alpha1, double alpha2, double beta, double sigma, double* out) {
    return guard([&] {
        need(out != nullptr, "out is NULL");
        *out = aztec::clt_cov_critical(k1, k2, alpha1, alpha2, beta, sigma);
    });
}

az_status az_experiment_run(const char* config_json, const uint64_t* seed, int workers, const char* out_dir,
                            az_report** out) {
    return guard([&] {
        need(config_json && out, "NULL argument");
        auto cfg = aztec::config_from_json(nlohmann::json::parse(config_json));
        if (seed) cfg.master_seed = *seed;
        if (workers >= 0) cfg.workers = workers;
        if (out_dir) cfg.out_dir = out_dir;
        cfg.validate();
        *out = new az_report{aztec::run_experiment(cfg)};
    });
}

void az_report_free(az_report* r) { delete r; }

az_status az_report_json(const az_report* r, char** out) {
    return guard([&] {
        need(r && out, "NULL argument");
        *out = dup_string(r->r.to_json().dump(2));
    });
}

az_status az_report_csv(const az_report* r, char** out) {
    return guard([&] {
        need(r && out, "NULL argument");
        *out = dup_string(r->r.csv());
    });
}

az_status az_report_manifest(const az_report* r, char** out) {
    return guard([&] {
        need(r && out, "NULL argument");
        *out = dup_string(r->r.manifest.to_json().dump(2));
    });
}

}  // extern "C"
