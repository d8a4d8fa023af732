#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "environment.hpp"
#include "jets.hpp"

namespace aztec {

// A numerical result failed its own consistency check (e.g. a contour
// integral that should be real came out complex).
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double a = 0.0;      // lim (M-N)/N
    double alpha = 1.0;  // lim N/M
    WeightDistribution dist = WeightDistribution::point_mass(0.5);

    static ModelParams from_alpha(double alpha, WeightDistribution d);
    static ModelParams from_a(double a, WeightDistribution d);
};

struct ContourSpec {
    cplx center{1.0, 0.0};
    double radius = 0.5;
    int nodes = 512;
};

// (1/2πi) ∮ f(z) dz by the trapezoid rule on a circle
cplx contour_integral(const std::function<cplx(cplx)>& f, const ContourSpec& c);

// ( E ∏_i (1 - b + x_i b) )^(M-N), xs of length N
cplx sgf_annealed(const std::vector<cplx>& xs, int N, int M, const WeightDistribution& d);
// Same quantity as Σ_λ ρ(λ) s_λ(x)/s_λ(1^N) over the Schur measure of λ^(N),
// averaged over every atom assignment of b_{N+1..M}. Discrete laws only.
double sgf_schur_sum(const std::vector<double>& xs, int N, int M, const WeightDistribution& d);

cplx curly_F(cplx z, const ModelParams& p);
cplx curly_F_derivative(cplx z, const ModelParams& p);

double lln_moment_contour(int k, const ModelParams& p, const ContourSpec& c = {});

// Limits F_k(u_1..u_k) of N-th roots of Schur generating functions, evaluable
// on jets of two or four variables.
class FFamily {
public:
    using Eval2 = std::function<Jet<2>(const std::vector<Jet<2>>&)>;
    using Eval4 = std::function<Jet<4>(const std::vector<Jet<4>>&)>;

    FFamily(std::string name, Eval2 e2, Eval4 e4) : name_(std::move(name)), e2_(std::move(e2)), e4_(std::move(e4)) {}

    Jet<2> operator()(const std::vector<Jet<2>>& args) const { return e2_(args); }
    Jet<4> operator()(const std::vector<Jet<4>>& args) const { return e4_(args); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Eval2 e2_;
    Eval4 e4_;
};

// (E ∏ (1 - b + u_i b))^a
FFamily schur_family(double a, const WeightDistribution& d);
// exp(Σ_i a E log(1 - b + u_i b)); equals schur_family for a point mass
FFamily factorized_family(double a, const WeightDistribution& d);

double lln_moment_general(int k, const FFamily& f);
// Factorized form with 𝖥'(u) = a E[b/(1 - b + b u)]
double lln_moment_sanity(int k, double a, const WeightDistribution& d);

constexpr int kMaxFreeCumulant = 8;
std::vector<double> free_cumulants(int k_max, const FFamily& f);
std::vector<double> free_cumulants(int k_max, const ModelParams& p);
// moments μ_1..μ_n from free cumulants c_1..c_n via non-crossing partitions
std::vector<double> moments_from_free_cumulants(const std::vector<double>& c);
std::vector<double> free_cumulants_from_moments(const std::vector<double>& mu);

struct LimitShapePoint {
    double alpha = 0.0;
    double y = 0.0;
    cplx z{0.0, 0.0};
    double density = 0.0;
    bool liquid = false;
    int upper_roots = 0;  // roots of F(z) = y/α in the open upper half-plane
    int iterations = 0;
    double residual = 0.0;
};

class LimitShapeSolver {
public:
    LimitShapeSolver(const WeightDistribution& d, double alpha);

    LimitShapePoint solve(double y, cplx hint = cplx(0.0, 0.0)) const;
    // α·F(z_c) over real critical points z_c of F(·; a): where double roots occur
    std::vector<double> double_root_levels() const;

    double a() const { return a_; }

private:
    struct Piece {
        double lo_z, hi_z;    // monotone on (lo_z, hi_z); infinities allowed
        double lo_f, hi_f;    // limits of F at the ends
        int interval;         // index into intervals_
    };
    struct Interval {
        double l, r;
        int baseline;  // real roots present for every level
    };

    double alpha_, a_;
    std::vector<double> q_, p_;  // poles -(1-b)/b ascending, with masses
    std::vector<Interval> intervals_;
    std::vector<Piece> pieces_;
    std::vector<double> critical_;

    double F(double z) const;
    double dF(double z) const;
    cplx F(cplx z) const;
    cplx dF(cplx z) const;
    bool newton(cplx& z, double target, int& iters, double& res) const;
    double bisect(const Piece& pc, double target) const;
};

LimitShapePoint limit_shape_density(double alpha, double y, const WeightDistribution& d);

struct LimitShapeGrid {
    int n = 0;                            // n x n cell centres
    std::vector<LimitShapePoint> points;  // row-major, alpha outer
};
LimitShapeGrid limit_shape_grid(const WeightDistribution& d, int n, int workers = 1);

struct ArcticPoint {
    double alpha, y;
    double z;  // the double root (infinite for the point at z = ∞)
};
// sorted by alpha
std::vector<ArcticPoint> arctic_curve(const WeightDistribution& d, int n_points);

enum class CltForm { ACarrying, Literal };

double clt_cov_fixed(int k, int l, const ModelParams& p, CltForm form = CltForm::ACarrying, double eps = 0.1,
                     int nodes = 512);
double clt_cov_general(int k, int l, const FFamily& f);
// Cov(p_k1 at level α1, p_k2 at level α2) / M^(k1+k2); symmetric in the pairs
double clt_cov_critical(int k1, int k2, double alpha1, double alpha2, double beta, double sigma, double eps = 0.05,
                        int nodes = 256);
// One-level formula with generic 𝖥 and optional 𝖦, scale N^(k1+k2)
double clt_cov_bg2(int k1, int k2, const std::function<cplx(cplx)>& F,
                   const std::function<cplx(cplx, cplx)>& G, double eps = 0.05, int nodes = 256);

struct LemmaReport {
    bool ok = true;
    double symmetrization_max_rel = 0.0;
    double roots_max_abs = 0.0;
    double eigen_max_abs = 0.0;
    std::vector<std::string> lines;
};
LemmaReport lemma_property_tests(std::uint64_t seed = 20240601);

}  // namespace aztec
