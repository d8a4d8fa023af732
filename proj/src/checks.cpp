#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "analytic.hpp"
#include "aztec.hpp"
#include "sampler.hpp"

namespace aztec {

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational: empty string");
    if (s.find('/') != std::string::npos) {
        Rational q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("rational: cannot parse \"" + s + "\"");
        if (q.get_den() == 0) throw std::invalid_argument("rational: zero denominator");
        q.canonicalize();
        return q;
    }
    // decimal with optional exponent, converted digit by digit
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    mpz_class digits = 0;
    long exp10 = 0;
    bool any = false, dot = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        if (s[i] == '.' && !dot) {
            dot = true;
        } else if (s[i] >= '0' && s[i] <= '9') {
            digits = digits * 10 + (s[i] - '0');
            if (dot) --exp10;
            any = true;
        } else {
            throw std::invalid_argument("rational: cannot parse \"" + s + "\"");
        }
    }
    if (!any) throw std::invalid_argument("rational: cannot parse \"" + s + "\"");
    if (i < s.size()) {
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(s.substr(i + 1), &used);
        } catch (...) {
            throw std::invalid_argument("rational: cannot parse \"" + s + "\"");
        }
        if (used != s.size() - i - 1 || std::abs(e) > 400) throw std::invalid_argument("rational: bad exponent");
        exp10 += e;
    }
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exp10)));
    Rational q = exp10 >= 0 ? Rational(digits * p10) : Rational(digits, p10);
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

std::vector<Rational> default_enumeration_weights(int M) {
    const Rational base[] = {Rational(2), Rational(1, 2), Rational(3), Rational(1)};
    std::vector<Rational> w;
    for (int t = 0; t < M; ++t) w.push_back(base[t % 4]);
    return w;
}

EnumerationReport verify_enumeration(int M, const std::vector<Rational>& weights) {
    if (M < 1 || M > 3) throw std::invalid_argument("enumerate-verify: M must be in [1,3]");
    if (static_cast<int>(weights.size()) != M) throw std::invalid_argument("enumerate-verify: need M weights");
    for (const Rational& w : weights)
        if (w <= 0) throw std::invalid_argument("enumerate-verify: weights must be positive");

    EnumerationReport rep;
    rep.M = M;
    rep.weights = weights;
    std::vector<Rational> betas;
    for (const Rational& w : weights) betas.push_back(w / (1 + w));

    const Rational Z = partition_function(weights);
    Rational product = 1;
    for (int t = 1; t <= M; ++t)
        for (int r = 0; r < t; ++r) product *= 1 + weights[t - 1];

    const std::vector<Tiling> all = enumerate_tilings(M);
    const auto law = shuffle_output_law(weights);
    rep.tilings = static_cast<long long>(all.size());
    rep.count_ok = rep.tilings == (1LL << (M * (M + 1) / 2));

    Rational sum = 0;
    bool law_ok = law.size() == all.size();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Tiling& t = all[i];
        const Rational target = tiling_weight(t, weights) / Z;
        sum += tiling_weight(t, weights);
        std::string why;
        if (!is_valid_tiling(t)) why = "invalid tiling";
        const SignatureSequence seq = tiling_to_signatures(t);
        if (why.empty() && !is_valid_sequence(seq)) why = "signature sequence fails interlacing";
        if (why.empty() && signatures_to_tiling(seq) != t) why = "bijection roundtrip";
        if (why.empty() && reconstruct_tiling(height_function(t)) != t) why = "height roundtrip";
        if (why.empty() && decode_binary(encode_binary(t)) != t) why = "binary roundtrip";
        if (why.empty() && sequence_probability(seq, betas).value != target) why = "sequence probability";
        if (why.empty()) {
            auto it = law.find(t);
            if (it == law.end() || it->second != target) {
                why = "shuffle output probability";
                law_ok = false;
            }
        }
        if (why.empty())
            ++rep.verified;
        else
            rep.failures.push_back("tiling " + std::to_string(i) + ": " + why);
    }
    rep.partition_ok = sum == product && Z == product;
    rep.shuffle_law_ok = law_ok;
    return rep;
}

std::vector<NamedDistribution> test_environments() {
    return {{"point:0.5", WeightDistribution::point_mass(0.5)},
            {"discreteW:0.5@0.5,5@0.5", WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5})},
            {"uniformW:0,2", WeightDistribution::uniform_on_w(0.0, 2.0)},
            {"two-point:0.5+-0.2", WeightDistribution::two_point(0.5, 0.2)}};
}

bool SelfCheckReport::ok() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.ok; });
}

namespace {

void add(SelfCheckReport& r, std::string name, double err, double tol) {
    r.lines.push_back({std::move(name), err, tol, err <= tol});
}

}  // namespace

SelfCheckReport selfcheck(std::uint64_t seed) {
    SelfCheckReport rep;

    const LemmaReport lem = lemma_property_tests(seed);
    add(rep, "symmetrization identity, m <= 5, 50 random G (relative)", lem.symmetrization_max_rel, 1e-5);
    add(rep, "roots-of-unity vanishing, 100 random polynomials", lem.roots_max_abs, 1e-10);
    add(rep, "D_k eigenrelation, N <= 3, k <= 2", lem.eigen_max_abs, 1e-6);

    {
        double err = 0.0;
        const std::vector<WeightDistribution> ds{WeightDistribution::point_mass(0.5),
                                                 WeightDistribution::discrete_on_w({0.5, 5.0}, {0.5, 0.5})};
        for (const auto& d : ds)
            for (int N = 1; N <= 3; ++N)
                for (int extra = 0; extra <= 3; ++extra) {
                    std::vector<double> xs{0.7, 1.3, 0.9};
                    xs.resize(N);
                    const std::vector<cplx> zs(xs.begin(), xs.end());
                    const double lhs = sgf_annealed(zs, N, N + extra, d).real();
                    const double rhs = sgf_schur_sum(xs, N, N + extra, d);
                    err = std::max(err, std::abs(lhs - rhs));
                }
        add(rep, "Schur generating function vs explicit Schur-measure sum", err, 1e-10);
    }

    const auto envs = test_environments();
    double lln = 0, lln0 = 0, mu1 = 0, fc = 0, clt = 0, var = 0;
    for (const auto& e : envs) {
        const ModelParams p = ModelParams::from_alpha(0.5, e.dist);
        const ModelParams p0 = ModelParams::from_a(0.0, e.dist);
        const FFamily f = schur_family(p.a, e.dist);
        std::vector<double> mu;
        for (int k = 1; k <= 6; ++k) {
            const double c = lln_moment_contour(k, p);
            mu.push_back(c);
            lln = std::max(lln, std::abs(c - lln_moment_general(k, f)));
            lln0 = std::max(lln0, std::abs(lln_moment_contour(k, p0) - 1.0 / (k + 1)));
        }
        mu1 = std::max(mu1, std::abs(mu[0] - (0.5 + p.a * e.dist.mean())));
        const auto rebuilt = moments_from_free_cumulants(free_cumulants(6, p));
        for (int k = 0; k < 6; ++k) fc = std::max(fc, std::abs(rebuilt[k] - mu[k]));
        for (int k = 1; k <= 3; ++k)
            for (int l = 1; l <= 3; ++l) clt = std::max(clt, std::abs(clt_cov_fixed(k, l, p) - clt_cov_general(k, l, f)));
        var = std::max(var, std::abs(clt_cov_fixed(1, 1, p) - p.a * e.dist.variance()));
    }
    add(rep, "LLN moments: contour vs jets, k <= 6, 4 environments", lln, 1e-8);
    add(rep, "LLN moments at a = 0 equal 1/(k+1)", lln0, 1e-8);
    add(rep, "first moment equals 1/2 + a E b", mu1, 1e-12);
    add(rep, "moments rebuilt from free cumulants, k <= 6", fc, 1e-8);
    {
        const auto c = free_cumulants(2, ModelParams::from_a(0.0, WeightDistribution::point_mass(0.5)));
        add(rep, "free cumulant c_2 at a = 0 equals 1/12", std::abs(c[1] - 1.0 / 12.0), 1e-12);
    }
    add(rep, "CLT covariance: contour vs jets, k, l <= 3", clt, 1e-6);
    add(rep, "CLT covariance k = l = 1 equals a Var b", var, 1e-10);
    {
        double pm = 0;
        const ModelParams p = ModelParams::from_alpha(0.5, WeightDistribution::point_mass(0.5));
        for (int k = 1; k <= 3; ++k)
            for (int l = 1; l <= 3; ++l) pm = std::max(pm, std::abs(clt_cov_fixed(k, l, p)));
        add(rep, "CLT covariance vanishes for a point mass", pm, 1e-12);
    }
    {
        const LimitShapePoint pt = limit_shape_density(0.5, 0.5, WeightDistribution::point_mass(0.5));
        add(rep, "limit shape density at the centre is 1/2",
            std::max(std::abs(pt.density - 0.5), std::abs(pt.z - cplx(0.0, 1.0))), 1e-10);
        double dev = 0;
        for (const ArcticPoint& q : arctic_curve(WeightDistribution::point_mass(0.5), 400))
            dev = std::max(dev, std::abs(std::pow(2 * q.alpha - 1, 2) + std::pow(2 * q.y - 1, 2) - 1.0));
        add(rep, "arctic curve of the uniform measure is the inscribed circle", dev, 1e-6);
    }
    {
        const double c12 = clt_cov_critical(1, 2, 1.0 / 3, 2.0 / 3, 0.5, 1.0);
        const double c21 = clt_cov_critical(2, 1, 2.0 / 3, 1.0 / 3, 0.5, 1.0);
        add(rep, "critical covariance symmetric under swapping the pairs", std::abs(c12 - c21), 1e-10);
        // GFF part 1/36 plus the environment part 2/27
        const double v = clt_cov_critical(1, 1, 1.0 / 3, 2.0 / 3, 0.5, 1.0);
        add(rep, "critical cross-level covariance closed form", std::abs(v - (1.0 / 36 + 2.0 / 27)), 1e-10);
    }
    return rep;
}

}  // namespace aztec
