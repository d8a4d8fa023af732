#include <aztecenv/aztecenv.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTolerance = 2;

struct Failure {
    int code;
    std::string message;
};

void check(az_status s) {
    if (s == AZ_OK) return;
    throw Failure{s == AZ_ERR_TOLERANCE ? kExitTolerance : kExitValidation, az_last_error()};
}

struct CString {
    char* p = nullptr;
    ~CString() { az_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitValidation, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kExitValidation, "cannot write " + path.string()};
    out << data;
}

// Keys of a JSON config fill options not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Failure{kExitValidation, std::string("config: ") + e.what()};
    }
    if (!j.is_object()) throw Failure{kExitValidation, "config: top level must be an object"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "config") throw Failure{kExitValidation, "config: key \"config\" not allowed"};
        CLI::Option* opt = sub->get_option_no_throw("--" + it.key());
        if (!opt) throw Failure{kExitValidation, "config: unknown key \"" + it.key() + "\""};
        if (opt->count() > 0) continue;
        auto as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (it->is_array())
            for (const json& v : *it) opt->add_result(as_text(v));
        else
            opt->add_result(as_text(*it));
        opt->run_callback();
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Common {
    std::string config;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
};

void add_common(CLI::App* sub, Common& c, const std::string& out_default) {
    c.out = out_default;
    sub->add_option("--config", c.config, "JSON file; its keys fill options not given on the command line")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output location");
}

// ---- sample ----

struct SampleOpts {
    Common c;
    int M = 16;
    std::string dist = "point:0.5";
    int count = 1;
    std::string sampler = "shuffle";
    bool svg = false, pgm = false;
    std::string palette = "four";
    double cell = 8.0;
};

int run_sample(const SampleOpts& o) {
    az_regime* reg = nullptr;
    check(az_regime_parse(o.dist.c_str(), &reg));
    std::unique_ptr<az_regime, void (*)(az_regime*)> reg_guard(reg, az_regime_free);
    if (o.M < 1) throw Failure{kExitValidation, "--M must be >= 1"};
    if (o.count < 1) throw Failure{kExitValidation, "--count must be >= 1"};
    const fs::path dir(o.c.out);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "sample,seed,file\n";
    for (int i = 0; i < o.count; ++i) {
        const std::uint64_t seed = az_sample_seed(o.c.seed, 0, static_cast<std::uint64_t>(i));
        az_tiling* t = nullptr;
        if (o.sampler == "shuffle") {
            check(az_tiling_sample(reg, o.M, seed, &t));
        } else {
            std::vector<double> betas(o.M);
            check(az_environment_sample(reg, o.M, seed, betas.data(), nullptr));
            check(az_tiling_chain(betas.data(), o.M, seed, &t));
        }
        std::unique_ptr<az_tiling, void (*)(az_tiling*)> tg(t, az_tiling_free);
        size_t len = 0;
        az_tiling_encode(t, nullptr, 0, &len);
        std::vector<std::uint8_t> bytes(len);
        check(az_tiling_encode(t, bytes.data(), bytes.size(), &len));
        const std::string stem = "tiling_" + std::to_string(i);
        write_file(dir / (stem + ".aztc"), std::string(bytes.begin(), bytes.end()));
        if (o.svg) {
            CString s;
            check(az_tiling_svg(t, o.palette == "four" ? 0 : 1, o.cell, &s.p));
            write_file(dir / (stem + ".svg"), s.str());
        }
        if (o.pgm) {
            std::uint8_t* buf = nullptr;
            check(az_tiling_height_pgm(t, &buf, &len));
            write_file(dir / (stem + ".pgm"), std::string(buf, buf + len));
            az_bytes_free(buf);
        }
        csv << i << ',' << seed << ',' << stem << ".aztc\n";
    }
    write_file(dir / "samples.csv", csv.str());
    std::cout << "wrote " << o.count << " tiling(s) of size " << o.M << " to " << dir.string() << "\n";
    return kExitOk;
}

// ---- enumerate-verify ----

struct EnumOpts {
    Common c;
    int M = 3;
    std::string weights;
};

int run_enumerate(const EnumOpts& o) {
    std::vector<std::string> ws;
    std::vector<const char*> ptrs;
    if (!o.weights.empty()) {
        ws = split(o.weights, ',');
        if (static_cast<int>(ws.size()) != o.M) throw Failure{kExitValidation, "--weights needs exactly M entries"};
        for (const auto& w : ws) ptrs.push_back(w.c_str());
    }
    long long tilings = 0, verified = 0;
    int ok = 0;
    CString details;
    check(az_enumerate_verify(o.M, ptrs.empty() ? nullptr : ptrs.data(), &tilings, &verified, &ok, &details.p));
    std::cout << details.str();
    std::cout << verified << " tilings verified";
    if (verified != tilings) std::cout << " of " << tilings;
    std::cout << "\n";
    return ok ? kExitOk : kExitValidation;
}

// ---- limit-shape ----

struct ShapeOpts {
    Common c;
    std::string dist = "point:0.5";
    int grid = 200;
    int arctic = 2000;
};

int run_limit_shape(const ShapeOpts& o) {
    if (o.grid < 1) throw Failure{kExitValidation, "--grid must be >= 1"};
    const std::size_t n = static_cast<std::size_t>(o.grid);
    std::vector<double> g(5 * n * n);
    check(az_limit_shape_grid(o.dist.c_str(), o.grid, o.c.workers, g.data()));

    const fs::path dir(o.c.out);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "alpha,y,re_z,im_z,density\n";
    for (std::size_t i = 0; i < n * n; ++i) {
        const double* r = &g[5 * i];
        csv << num(r[0]) << ',' << num(r[1]) << ',' << num(r[2]) << ',' << num(r[3]) << ',' << num(r[4]) << '\n';
    }
    write_file(dir / "limit_shape.csv", csv.str());

    // alpha left to right, y bottom to top; white = density 1
    std::string pgm = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < n; ++col) {
            const double d = g[5 * (col * n + (n - 1 - row)) + 4];
            pgm.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(d, 0.0, 1.0)))));
        }
    write_file(dir / "limit_shape.pgm", pgm);

    std::vector<double> arc(2 * static_cast<std::size_t>(o.arctic) + 8);
    size_t len = 0;
    az_status s = az_arctic_curve(o.dist.c_str(), o.arctic, arc.data(), arc.size() / 2, &len);
    if (s == AZ_ERR_BUFFER_TOO_SMALL) {
        arc.resize(2 * len);
        s = az_arctic_curve(o.dist.c_str(), o.arctic, arc.data(), len, &len);
    }
    check(s);
    std::ostringstream ac;
    ac << "alpha,y\n";
    for (std::size_t i = 0; i < len; ++i) ac << num(arc[2 * i]) << ',' << num(arc[2 * i + 1]) << '\n';
    write_file(dir / "arctic.csv", ac.str());

    std::cout << "limit_shape.csv: " << n * n << " rows; arctic.csv: " << len << " rows; limit_shape.pgm: " << n << "x"
              << n << "\n";
    return kExitOk;
}

// ---- moments / clt ----

struct MomentOpts {
    Common c;
    std::string dist = "point:0.5";
    std::vector<double> alphas{0.5};
    int kmax = 6;
};

void emit_json(const json& j, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << "\n";
    else
        write_file(out, j.dump(2) + "\n");
}

int run_moments(const MomentOpts& o) {
    if (o.kmax < 1 || o.kmax > 8) throw Failure{kExitValidation, "--kmax must lie in [1,8]"};
    json rows = json::array();
    for (double alpha : o.alphas) {
        std::vector<double> c(o.kmax);
        check(az_free_cumulants(o.dist.c_str(), alpha, o.kmax, c.data()));
        for (int k = 1; k <= o.kmax; ++k) {
            double contour = 0, jets = 0;
            check(az_lln_moment(o.dist.c_str(), alpha, k, 0, &contour));
            check(az_lln_moment(o.dist.c_str(), alpha, k, 1, &jets));
            rows.push_back({{"quantity", "moment"}, {"k", k}, {"l", nullptr}, {"alpha", alpha},
                            {"theory_value", contour}, {"method", "contour"}});
            rows.push_back({{"quantity", "moment"}, {"k", k}, {"l", nullptr}, {"alpha", alpha},
                            {"theory_value", jets}, {"method", "general"}});
            rows.push_back({{"quantity", "free_cumulant"}, {"k", k}, {"l", nullptr}, {"alpha", alpha},
                            {"theory_value", c[k - 1]}, {"method", "general"}});
        }
    }
    emit_json({{"dist", o.dist}, {"rows", rows}}, o.c.out);
    return kExitOk;
}

struct CltOpts {
    Common c;
    std::string dist = "point:0.5";
    std::vector<double> alphas{0.5};
    int kmax = 3;
    std::string form = "a-carrying";
};

int run_clt(const CltOpts& o) {
    if (o.kmax < 1 || o.kmax > 8) throw Failure{kExitValidation, "--kmax must lie in [1,8]"};
    json rows = json::array();
    if (o.dist.rfind("critical:", 0) == 0) {
        const auto parts = split(o.dist.substr(9), ',');
        if (parts.size() != 2) throw Failure{kExitValidation, "critical spec: expected critical:beta,sigma"};
        const double beta = std::stod(parts[0]), sigma = std::stod(parts[1]);
        for (std::size_t i = 0; i < o.alphas.size(); ++i)
            for (std::size_t j = i; j < o.alphas.size(); ++j)
                for (int k = 1; k <= o.kmax; ++k)
                    for (int l = 1; l <= o.kmax; ++l) {
                        double v = 0;
                        check(az_clt_cov_critical(k, l, o.alphas[i], o.alphas[j], beta, sigma, &v));
                        rows.push_back({{"k", k}, {"l", l}, {"alpha1", o.alphas[i]}, {"alpha2", o.alphas[j]},
                                        {"theory_value", v}, {"method", "contour-critical"}});
                    }
    } else {
        const int form = o.form == "a-carrying" ? 0 : 1;
        for (double alpha : o.alphas)
            for (int k = 1; k <= o.kmax; ++k)
                for (int l = k; l <= o.kmax; ++l) {
                    double v = 0, g = 0;
                    check(az_clt_cov_fixed(o.dist.c_str(), alpha, k, l, form, &v));
                    check(az_clt_cov_jets(o.dist.c_str(), alpha, k, l, &g));
                    rows.push_back({{"k", k}, {"l", l}, {"alpha", alpha}, {"theory_value", v},
                                    {"method", "contour-" + o.form}});
                    rows.push_back({{"k", k}, {"l", l}, {"alpha", alpha}, {"theory_value", g}, {"method", "general"}});
                }
    }
    emit_json({{"dist", o.dist}, {"rows", rows}}, o.c.out);
    return kExitOk;
}

// ---- montecarlo / selfcheck ----

int run_montecarlo(const Common& c, const CLI::App* sub) {
    if (c.config.empty()) throw Failure{kExitValidation, "montecarlo needs --config"};
    const std::string text = read_file(c.config);
    const bool seed_given = sub->get_option("--seed")->count() > 0;
    const bool workers_given = sub->get_option("--workers")->count() > 0;
    const bool out_given = sub->get_option("--out")->count() > 0;
    az_report* rep = nullptr;
    check(az_experiment_run(text.c_str(), seed_given ? &c.seed : nullptr, workers_given ? c.workers : -1,
                            out_given ? c.out.c_str() : nullptr, &rep));
    std::unique_ptr<az_report, void (*)(az_report*)> guard(rep, az_report_free);
    CString csv;
    check(az_report_csv(rep, &csv.p));
    std::cout << csv.str();
    return kExitOk;
}

int run_selfcheck(const Common& c, const CLI::App* sub) {
    const std::uint64_t seed = sub->get_option("--seed")->count() > 0 ? c.seed : 20240601;
    int ok = 0;
    CString details;
    check(az_selfcheck(seed, &ok, &details.p));
    std::cout << details.str() << (ok ? "selfcheck passed\n" : "selfcheck FAILED\n");
    return ok ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aztec diamond tilings in a one-periodic random environment"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(az_version()));

    SampleOpts so;
    auto* sample = app.add_subcommand("sample", "exact samples as binary tilings, SVG and height PGM");
    add_common(sample, so.c, "samples");
    sample->add_option("--M", so.M, "diamond size");
    sample->add_option("--dist", so.dist, "weight law or regime spec");
    sample->add_option("--count", so.count, "number of tilings");
    sample->add_option("--sampler", so.sampler, "shuffle or chain")->check(CLI::IsMember({"shuffle", "chain"}));
    sample->add_flag("--svg", so.svg, "also write SVG");
    sample->add_flag("--pgm", so.pgm, "also write the height function as PGM");
    sample->add_option("--palette", so.palette, "four or eight")->check(CLI::IsMember({"four", "eight"}));
    sample->add_option("--cell", so.cell, "SVG cell size in pixels");

    EnumOpts eo;
    auto* enumerate = app.add_subcommand("enumerate-verify", "exactness suite over all tilings, M <= 3");
    add_common(enumerate, eo.c, "");
    enumerate->add_option("--M", eo.M, "diamond size");
    enumerate->add_option("--weights", eo.weights, "comma-separated W_1..W_M as decimals or p/q");

    ShapeOpts lo;
    auto* shape = app.add_subcommand("limit-shape", "density grid CSV and PGM plus the arctic curve");
    add_common(shape, lo.c, "limit_shape");
    shape->add_option("--dist", lo.dist, "weight law");
    shape->add_option("--grid", lo.grid, "cells per side");
    shape->add_option("--arctic", lo.arctic, "arctic curve sample count");

    MomentOpts mo;
    auto* moments = app.add_subcommand("moments", "LLN moments and free cumulants as JSON");
    add_common(moments, mo.c, "");
    moments->add_option("--dist", mo.dist, "weight law");
    moments->add_option("--alpha", mo.alphas, "levels N/M")->expected(1, -1);
    moments->add_option("--kmax", mo.kmax, "largest moment order");

    CltOpts co;
    auto* clt = app.add_subcommand("clt", "covariance tables as JSON");
    add_common(clt, co.c, "");
    clt->add_option("--dist", co.dist, "weight law, or critical:beta,sigma");
    clt->add_option("--alpha", co.alphas, "levels N/M")->expected(1, -1);
    clt->add_option("--kmax", co.kmax, "largest moment order");
    clt->add_option("--form", co.form, "a-carrying or literal")->check(CLI::IsMember({"a-carrying", "literal"}));

    Common mc;
    auto* montecarlo = app.add_subcommand("montecarlo", "LLN, CLT and multilevel experiments from a JSON config");
    add_common(montecarlo, mc, "");

    Common sc;
    auto* self = app.add_subcommand("selfcheck", "lemma property tests and formula consistency");
    add_common(self, sc, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*sample) {
            if (!so.c.config.empty()) apply_config(sample, so.c.config);
            return run_sample(so);
        }
        if (*enumerate) {
            if (!eo.c.config.empty()) apply_config(enumerate, eo.c.config);
            return run_enumerate(eo);
        }
        if (*shape) {
            if (!lo.c.config.empty()) apply_config(shape, lo.c.config);
            return run_limit_shape(lo);
        }
        if (*moments) {
            if (!mo.c.config.empty()) apply_config(moments, mo.c.config);
            return run_moments(mo);
        }
        if (*clt) {
            if (!co.c.config.empty()) apply_config(clt, co.c.config);
            return run_clt(co);
        }
        if (*montecarlo) return run_montecarlo(mc, montecarlo);
        if (*self) {
            if (!sc.config.empty()) apply_config(self, sc.config);
            return run_selfcheck(sc, self);
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
