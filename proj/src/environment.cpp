#include "environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <gsl/gsl_integration.h>

#include "rng.hpp"

namespace aztec {

using nlohmann::json;

void WeightDistribution::check_b(double b) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("weight distribution: b must lie in (0,1), got " + std::to_string(b));
}

WeightDistribution WeightDistribution::point_mass(double b) {
    check_b(b);
    WeightDistribution d;
    d.kind_ = Kind::PointMass;
    d.b_ = {b};
    d.p_ = {1.0};
    return d;
}

WeightDistribution WeightDistribution::discrete(std::vector<double> bs, std::vector<double> ps) {
    if (bs.empty() || bs.size() != ps.size()) throw std::invalid_argument("discrete: need matching non-empty atoms and masses");
    for (double b : bs) check_b(b);
    for (double p : ps)
        if (!(p > 0.0)) throw std::invalid_argument("discrete: masses must be positive");
    const double total = std::accumulate(ps.begin(), ps.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("discrete: masses must sum to 1");
    for (double& p : ps) p /= total;
    WeightDistribution d;
    d.kind_ = Kind::Discrete;
    d.b_ = std::move(bs);
    d.p_ = std::move(ps);
    return d;
}

WeightDistribution WeightDistribution::discrete_on_w(const std::vector<double>& ws, std::vector<double> ps) {
    std::vector<double> bs;
    for (double w : ws) {
        if (!(w > 0.0)) throw std::invalid_argument("discrete: W atoms must be positive");
        bs.push_back(w / (1.0 + w));
    }
    return discrete(std::move(bs), std::move(ps));
}

namespace {

void gauss_legendre(double lo, double hi, int n, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    if (!table) throw std::runtime_error("gauss_legendre: table allocation failed");
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(lo, hi, static_cast<std::size_t>(i), &x[i], &w[i], table);
    gsl_integration_glfixed_table_free(table);
}

}  // namespace

WeightDistribution WeightDistribution::uniform_on_w(double lo, double hi, int nodes) {
    if (!(lo >= 0.0 && hi > lo)) throw std::invalid_argument("uniform on W: need 0 <= lo < hi");
    if (nodes < 2) throw std::invalid_argument("uniform: need at least 2 quadrature nodes");
    WeightDistribution d;
    d.kind_ = Kind::UniformW;
    d.lo_ = lo;
    d.hi_ = hi;
    d.nodes_ = nodes;
    std::vector<double> x, w;
    gauss_legendre(lo, hi, nodes, x, w);
    for (int i = 0; i < nodes; ++i) {
        d.b_.push_back(x[i] / (1.0 + x[i]));
        d.p_.push_back(w[i] / (hi - lo));
    }
    return d;
}

WeightDistribution WeightDistribution::uniform_on_b(double lo, double hi, int nodes) {
    if (!(lo >= 0.0 && hi > lo && hi < 1.0)) throw std::invalid_argument("uniform on b: need 0 <= lo < hi < 1");
    if (nodes < 2) throw std::invalid_argument("uniform: need at least 2 quadrature nodes");
    WeightDistribution d;
    d.kind_ = Kind::UniformB;
    d.lo_ = lo;
    d.hi_ = hi;
    d.nodes_ = nodes;
    std::vector<double> x, w;
    gauss_legendre(lo, hi, nodes, x, w);
    for (int i = 0; i < nodes; ++i) {
        d.b_.push_back(x[i]);
        d.p_.push_back(w[i] / (hi - lo));
    }
    return d;
}

WeightDistribution WeightDistribution::two_point(double beta, double spread) {
    if (spread == 0.0) return point_mass(beta);
    return discrete({beta - spread, beta + spread}, {0.5, 0.5});
}

WeightDistribution WeightDistribution::with_nodes(int nodes) const {
    if (kind_ == Kind::UniformW) return uniform_on_w(lo_, hi_, nodes);
    if (kind_ == Kind::UniformB) return uniform_on_b(lo_, hi_, nodes);
    return *this;
}

bool WeightDistribution::is_degenerate() const {
    if (kind_ == Kind::PointMass) return true;
    return std::all_of(b_.begin(), b_.end(), [&](double b) { return b == b_[0]; });
}

double WeightDistribution::moment(int k) const {
    if (k < 0) throw std::invalid_argument("moment: k >= 0");
    double s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j) s += p_[j] * std::pow(b_[j], k);
    return s;
}

double WeightDistribution::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j) s += p_[j] * (b_[j] - m) * (b_[j] - m);
    return s;
}

namespace {

cplx resolvent_term(double b, cplx z) {
    const cplx den = 1.0 - b + b * z;
    if (std::abs(den) < 1e-12) throw std::domain_error("resolvent: argument too close to a pole");
    return b / den;
}

}  // namespace

cplx WeightDistribution::expect_resolvent(cplx z) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j) s += p_[j] * resolvent_term(b_[j], z);
    return s;
}

cplx WeightDistribution::cov_resolvent(cplx z, cplx w) const {
    const cplx ez = expect_resolvent(z), ew = expect_resolvent(w);
    cplx s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j)
        s += p_[j] * (resolvent_term(b_[j], z) - ez) * (resolvent_term(b_[j], w) - ew);
    return s;
}

cplx WeightDistribution::expect_linear(cplx x) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j) s += p_[j] * (1.0 - b_[j] + b_[j] * x);
    return s;
}

json WeightDistribution::to_json() const {
    switch (kind_) {
        case Kind::PointMass: return {{"kind", "point_mass"}, {"b", b_[0]}};
        case Kind::Discrete: {
            json atoms = json::array();
            for (std::size_t j = 0; j < b_.size(); ++j) atoms.push_back({b_[j], p_[j]});
            return {{"kind", "discrete"}, {"atoms", atoms}};
        }
        case Kind::UniformW: return {{"kind", "uniform"}, {"on", "W"}, {"lo", lo_}, {"hi", hi_}, {"nodes", nodes_}};
        case Kind::UniformB: return {{"kind", "uniform"}, {"on", "b"}, {"lo", lo_}, {"hi", hi_}, {"nodes", nodes_}};
    }
    return {};
}

std::string WeightDistribution::describe() const { return to_json().dump(); }

RegimeSpec RegimeSpec::fixed(WeightDistribution d) {
    RegimeSpec r;
    r.regime = Regime::Fixed;
    r.dist = std::move(d);
    return r;
}

RegimeSpec RegimeSpec::critical(double beta, double sigma) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("critical regime: beta must lie in (0,1)");
    if (!(sigma >= 0.0)) throw std::invalid_argument("critical regime: sigma must be >= 0");
    RegimeSpec r;
    r.regime = Regime::Critical;
    r.beta = beta;
    r.sigma = sigma;
    r.dist = WeightDistribution::point_mass(beta);
    return r;
}

int RegimeSpec::min_admissible_M() const {
    if (regime == Regime::Fixed || sigma == 0.0) return 1;
    const double room = std::min(beta, 1.0 - beta);
    int m = static_cast<int>(std::floor(sigma * sigma / (room * room))) + 1;
    while (sigma / std::sqrt(static_cast<double>(m)) >= room) ++m;
    return std::max(m, 1);
}

WeightDistribution RegimeSpec::law_at(int M) const {
    if (regime == Regime::Fixed) return dist;
    if (M < min_admissible_M())
        throw std::invalid_argument("critical regime: beta ± sigma/sqrt(M) leaves (0,1); need M >= " +
                                    std::to_string(min_admissible_M()));
    return WeightDistribution::two_point(beta, sigma / std::sqrt(static_cast<double>(M)));
}

WeightDistribution RegimeSpec::limit_law() const {
    return regime == Regime::Fixed ? dist : WeightDistribution::point_mass(beta);
}

json RegimeSpec::to_json() const {
    if (regime == Regime::Fixed) return {{"regime", "fixed"}, {"dist", dist.to_json()}};
    return {{"regime", "critical"}, {"beta", beta}, {"sigma", sigma}};
}

EnvironmentSample sample_environment(const RegimeSpec& spec, int M, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("sample_environment: M >= 1");
    const WeightDistribution law = spec.law_at(M);
    SplitMix64 rng(SplitMix64::finalize(seed ^ 0x5be0cd19137e2179ULL));
    EnvironmentSample env;
    env.seed = seed;
    env.betas.resize(M);
    env.weights.resize(M);
    for (int i = 0; i < M; ++i) {
        env.betas[i] = law.sample(rng);
        env.weights[i] = env.betas[i] / (1.0 - env.betas[i]);
    }
    return env;
}

EnvironmentSample environment_from_betas(const std::vector<double>& betas) {
    EnvironmentSample env;
    env.betas = betas;
    for (double b : betas) {
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("environment: betas must lie in (0,1)");
        env.weights.push_back(b / (1.0 - b));
    }
    return env;
}

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
            throw std::invalid_argument(std::string(what) + ": unknown key \"" + it.key() + "\"");
}

double number(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string(what) + ": missing numeric field \"" + key + "\"");
    return j.at(key).get<double>();
}

}  // namespace

WeightDistribution distribution_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw std::invalid_argument("dist: object with a string \"kind\" required");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "point_mass") {
        only_keys(j, {"kind", "b"}, "dist point_mass");
        return WeightDistribution::point_mass(number(j, "b", "dist point_mass"));
    }
    if (kind == "discrete") {
        only_keys(j, {"kind", "atoms", "w_atoms"}, "dist discrete");
        const bool on_w = j.contains("w_atoms");
        if (on_w == j.contains("atoms")) throw std::invalid_argument("dist discrete: give exactly one of atoms / w_atoms");
        const json& atoms = j.at(on_w ? "w_atoms" : "atoms");
        if (!atoms.is_array() || atoms.empty()) throw std::invalid_argument("dist discrete: atoms must be a non-empty array");
        std::vector<double> xs, ps;
        for (const auto& a : atoms) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
                throw std::invalid_argument("dist discrete: each atom is [value, mass]");
            xs.push_back(a[0].get<double>());
            ps.push_back(a[1].get<double>());
        }
        return on_w ? WeightDistribution::discrete_on_w(xs, ps) : WeightDistribution::discrete(xs, ps);
    }
    if (kind == "uniform") {
        only_keys(j, {"kind", "on", "lo", "hi", "nodes"}, "dist uniform");
        const std::string on = j.value("on", std::string("W"));
        const int nodes = j.contains("nodes") ? j.at("nodes").get<int>() : 64;
        const double lo = number(j, "lo", "dist uniform"), hi = number(j, "hi", "dist uniform");
        if (on == "W") return WeightDistribution::uniform_on_w(lo, hi, nodes);
        if (on == "b") return WeightDistribution::uniform_on_b(lo, hi, nodes);
        throw std::invalid_argument("dist uniform: \"on\" must be \"W\" or \"b\"");
    }
    throw std::invalid_argument("dist: unknown kind \"" + kind + "\"");
}

RegimeSpec regime_from_json(const json& j) {
    if (!j.is_object() || !j.contains("regime")) throw std::invalid_argument("regime: object with \"regime\" required");
    const std::string r = j.at("regime").get<std::string>();
    if (r == "fixed") {
        only_keys(j, {"regime", "dist"}, "regime fixed");
        if (!j.contains("dist")) throw std::invalid_argument("regime fixed: \"dist\" required");
        return RegimeSpec::fixed(distribution_from_json(j.at("dist")));
    }
    if (r == "critical") {
        only_keys(j, {"regime", "beta", "sigma"}, "regime critical");
        return RegimeSpec::critical(number(j, "beta", "regime critical"), number(j, "sigma", "regime critical"));
    }
    throw std::invalid_argument("regime: must be \"fixed\" or \"critical\"");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("dist shorthand: bad number \"" + s + "\"");
    return v;
}

}  // namespace

WeightDistribution distribution_from_shorthand(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("dist shorthand: expected kind:params, got \"" + s + "\"");
    const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
    if (kind == "point") return WeightDistribution::point_mass(to_double(rest));
    if (kind == "discrete" || kind == "discreteW") {
        std::vector<double> xs, ps;
        for (const auto& atom : split(rest, ',')) {
            auto at = atom.find('@');
            if (at == std::string::npos) throw std::invalid_argument("dist shorthand: atoms are value@mass");
            xs.push_back(to_double(atom.substr(0, at)));
            ps.push_back(to_double(atom.substr(at + 1)));
        }
        return kind == "discrete" ? WeightDistribution::discrete(xs, ps) : WeightDistribution::discrete_on_w(xs, ps);
    }
    if (kind == "uniformW" || kind == "uniformB") {
        auto parts = split(rest, ',');
        if (parts.size() != 2 && parts.size() != 3) throw std::invalid_argument("dist shorthand: uniform needs lo,hi[,nodes]");
        const int nodes = parts.size() == 3 ? static_cast<int>(to_double(parts[2])) : 64;
        const double lo = to_double(parts[0]), hi = to_double(parts[1]);
        return kind == "uniformW" ? WeightDistribution::uniform_on_w(lo, hi, nodes)
                                  : WeightDistribution::uniform_on_b(lo, hi, nodes);
    }
    throw std::invalid_argument("dist shorthand: unknown kind \"" + kind + "\"");
}

}  // namespace aztec
