#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace aztec {

using cplx = std::complex<double>;

// Law of the parameter b = W/(1+W). Every law is reduced to nodes (b_j, p_j);
// intervals use Gauss-Legendre nodes for expectations but are sampled exactly.
class WeightDistribution {
public:
    enum class Kind { PointMass, Discrete, UniformW, UniformB };

    static WeightDistribution point_mass(double b);
    static WeightDistribution discrete(std::vector<double> bs, std::vector<double> ps);
    static WeightDistribution discrete_on_w(const std::vector<double>& ws, std::vector<double> ps);
    static WeightDistribution uniform_on_w(double lo, double hi, int nodes = 64);
    static WeightDistribution uniform_on_b(double lo, double hi, int nodes = 64);
    // b = beta ± spread with probability 1/2 each
    static WeightDistribution two_point(double beta, double spread);

    Kind kind() const { return kind_; }
    const std::vector<double>& nodes() const { return b_; }
    const std::vector<double>& masses() const { return p_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int quadrature_nodes() const { return nodes_; }
    bool is_degenerate() const;

    double moment(int k) const;
    double mean() const { return moment(1); }
    double variance() const;
    cplx expect_resolvent(cplx z) const;
    cplx cov_resolvent(cplx z, cplx w) const;
    // E[(1 - b + b x)] for the one-variable factor of the Schur generating function
    cplx expect_linear(cplx x) const;

    template <class Rng>
    double sample(Rng& rng) const;

    // same law with a different node count (intervals only)
    WeightDistribution with_nodes(int nodes) const;

    nlohmann::json to_json() const;
    std::string describe() const;

private:
    Kind kind_ = Kind::PointMass;
    std::vector<double> b_, p_;
    double lo_ = 0, hi_ = 0;
    int nodes_ = 0;

    static void check_b(double b);
};

struct RegimeSpec {
    enum class Regime { Fixed, Critical };
    Regime regime = Regime::Fixed;
    WeightDistribution dist = WeightDistribution::point_mass(0.5);
    double beta = 0.5;
    double sigma = 0.0;

    static RegimeSpec fixed(WeightDistribution d);
    static RegimeSpec critical(double beta, double sigma);

    // law of each b_i at size M; throws std::invalid_argument naming the minimal M
    WeightDistribution law_at(int M) const;
    // law entering the limit-shape and LLN formulas
    WeightDistribution limit_law() const;
    int min_admissible_M() const;

    nlohmann::json to_json() const;
};

struct EnvironmentSample {
    std::vector<double> betas;
    std::vector<double> weights;
    std::uint64_t seed = 0;
};

EnvironmentSample sample_environment(const RegimeSpec& spec, int M, std::uint64_t seed);
EnvironmentSample environment_from_betas(const std::vector<double>& betas);

// Strict parsing; unknown keys are rejected with std::invalid_argument.
WeightDistribution distribution_from_json(const nlohmann::json& j);
RegimeSpec regime_from_json(const nlohmann::json& j);
// "point:0.5", "discrete:b@p,b@p", "discreteW:w@p,w@p", "uniformW:lo,hi[,nodes]", "uniformB:lo,hi[,nodes]"
WeightDistribution distribution_from_shorthand(const std::string& s);

template <class Rng>
double WeightDistribution::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::PointMass: return b_[0];
        case Kind::UniformW: {
            double w = lo_ + (hi_ - lo_) * rng.uniform();
            return w / (1.0 + w);
        }
        case Kind::UniformB: return lo_ + (hi_ - lo_) * rng.uniform();
        case Kind::Discrete: {
            double u = rng.uniform(), acc = 0.0;
            for (std::size_t j = 0; j + 1 < b_.size(); ++j) {
                acc += p_[j];
                if (u < acc) return b_[j];
            }
            return b_.back();
        }
    }
    return b_[0];
}

}  // namespace aztec
