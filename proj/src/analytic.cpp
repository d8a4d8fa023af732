#include "analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <gmpxx.h>

#include "combinatorics.hpp"
#include "rng.hpp"

namespace aztec {

namespace {

constexpr double kPi = std::numbers::pi;

cplx root_of_unity(int m, int j) { return std::polar(1.0, 2.0 * kPi * j / m); }

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double real_or_throw(cplx v, double tol, const char* what) {
    if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v.real())))
        throw ToleranceError(std::string(what) + ": imaginary part " + std::to_string(v.imag()) +
                             " exceeds tolerance; check the contour configuration");
    return v.real();
}

template <class J>
J schur_family_eval(const std::vector<J>& args, double a, const WeightDistribution& d) {
    const auto& orders = args.front().orders();
    J s(orders);
    const auto& b = d.nodes();
    const auto& p = d.masses();
    for (std::size_t n = 0; n < b.size(); ++n) {
        J prod(orders, 1.0);
        for (const J& x : args) prod *= x * b[n] + (1.0 - b[n]);
        s += prod * p[n];
    }
    return s.pow(a);
}

template <class J>
J factorized_family_eval(const std::vector<J>& args, double a, const WeightDistribution& d) {
    const auto& orders = args.front().orders();
    J s(orders);
    const auto& b = d.nodes();
    const auto& p = d.masses();
    for (const J& x : args)
        for (std::size_t n = 0; n < b.size(); ++n) s += (x * b[n] + (1.0 - b[n])).log() * p[n];
    return (s * a).exp();
}

// coefficients [x1^i x2^j] at fixed orders e1, e2 in the auxiliary directions
Jet<2> project(const Jet<4>& f, int e1, int e2) {
    const auto& o = f.orders();
    Jet<2> r({o[0], o[1]});
    for (int i = 0; i <= o[0]; ++i)
        for (int j = 0; j <= o[1]; ++j) r.coef({i, j}) = f.coef({i, j, e1, e2});
    return r;
}

// ∂₁F_{m+1}(1+x+e, 1+x w, ..., 1+x w^m) as a jet in x of order m
Jet1 first_partial_on_roots(const FFamily& f, int m, int order) {
    const Jet2::Index o{order, 1};
    const Jet2 x = Jet2::variable(o, 0), e = Jet2::variable(o, 1);
    std::vector<Jet2> args;
    args.push_back(x + e + 1.0);
    for (int j = 1; j <= m; ++j) args.push_back(x * root_of_unity(m + 1, j) + 1.0);
    const Jet2 val = f(args);
    Jet1 g({order});
    for (int i = 0; i <= order; ++i) g.coef({i}) = val.coef({i, 1});
    return g;
}

// Bernoulli numbers B_0..B_n with B_1 = +1/2
std::vector<double> bernoulli_plus(int n) {
    std::vector<mpq_class> B(n + 1);
    B[0] = 1;
    for (int m = 1; m <= n; ++m) {
        mpq_class s = 0;
        mpz_class c = 1;  // C(m+1, j)
        for (int j = 0; j < m; ++j) {
            s += c * B[j];
            c = c * (m + 1 - j) / (j + 1);
        }
        B[m] = -s / (m + 1);
    }
    if (n >= 1) B[1] = mpq_class(1, 2);
    std::vector<double> out(n + 1);
    for (int m = 0; m <= n; ++m) out[m] = B[m].get_d();
    return out;
}

}  // namespace

ModelParams ModelParams::from_alpha(double alpha, WeightDistribution d) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
    return {1.0 / alpha - 1.0, alpha, std::move(d)};
}

ModelParams ModelParams::from_a(double a, WeightDistribution d) {
    if (!(a >= 0.0)) throw std::invalid_argument("a must be nonnegative");
    return {a, 1.0 / (1.0 + a), std::move(d)};
}

cplx contour_integral(const std::function<cplx(cplx)>& f, const ContourSpec& c) {
    cplx s = 0.0;
    for (int j = 0; j < c.nodes; ++j) {
        const cplx dz = std::polar(c.radius, 2.0 * kPi * (j + 0.5) / c.nodes);
        s += f(c.center + dz) * dz;
    }
    return s / static_cast<double>(c.nodes);
}

cplx sgf_annealed(const std::vector<cplx>& xs, int N, int M, const WeightDistribution& d) {
    if (N < 0 || N > M) throw std::invalid_argument("sgf_annealed: need 0 <= N <= M");
    if (static_cast<int>(xs.size()) != N) throw std::invalid_argument("sgf_annealed: need N points");
    cplx e = 0.0;
    const auto& b = d.nodes();
    const auto& p = d.masses();
    for (std::size_t n = 0; n < b.size(); ++n) {
        cplx prod = 1.0;
        for (cplx x : xs) prod *= 1.0 - b[n] + x * b[n];
        e += p[n] * prod;
    }
    cplx r = 1.0;
    for (int i = 0; i < M - N; ++i) r *= e;
    return r;
}

double sgf_schur_sum(const std::vector<double>& xs, int N, int M, const WeightDistribution& d) {
    if (N < 1 || N > M || static_cast<int>(xs.size()) != N)
        throw std::invalid_argument("sgf_schur_sum: need 1 <= N <= M and N points");
    const int K = M - N;
    const auto& b = d.nodes();
    const auto& p = d.masses();
    if (std::pow(static_cast<double>(b.size()), K) > 1e6)
        throw std::invalid_argument("sgf_schur_sum: too many atom assignments");
    if (K == 0) return 1.0;

    // signatures of length N with K >= λ_1 >= ... >= λ_N >= 0
    std::vector<Signature> sigs;
    Signature lam(N, 0);
    std::function<void(int, int)> rec = [&](int i, int cap) {
        if (i == N) {
            sigs.push_back(lam);
            return;
        }
        for (int v = 0; v <= cap; ++v) {
            lam[i] = v;
            rec(i + 1, v);
        }
    };
    rec(0, K);

    std::vector<double> sx(sigs.size());
    std::vector<Signature> conj(sigs.size());
    for (std::size_t s = 0; s < sigs.size(); ++s) {
        sx[s] = schur_eval_jacobi_trudi(sigs[s], xs);
        const Signature& l = sigs[s];
        Signature c(K, 0);
        for (int part : l)
            for (int j = 0; j < part; ++j) ++c[j];
        conj[s] = c;
    }

    double total = 0.0;
    std::vector<std::size_t> pick(K, 0);
    while (true) {
        double mass = 1.0, pref = 1.0;
        std::vector<double> ws(K);
        for (int j = 0; j < K; ++j) {
            const double bj = b[pick[j]];
            mass *= p[pick[j]];
            pref *= std::pow(1.0 - bj, N);
            ws[j] = bj / (1.0 - bj);
        }
        double inner = 0.0;
        for (std::size_t s = 0; s < sigs.size(); ++s) inner += schur_eval_jacobi_trudi(conj[s], ws) * sx[s];
        total += mass * pref * inner;

        int j = 0;
        while (j < K && ++pick[j] == b.size()) pick[j++] = 0;
        if (j == K) break;
    }
    return total;
}

cplx curly_F(cplx z, const ModelParams& p) {
    if (std::abs(z - 1.0) < 1e-12) throw std::domain_error("curly_F: z too close to the pole at 1");
    return z / (z - 1.0) + p.a * z * p.dist.expect_resolvent(z);
}

cplx curly_F_derivative(cplx z, const ModelParams& p) {
    if (std::abs(z - 1.0) < 1e-12) throw std::domain_error("curly_F: z too close to the pole at 1");
    cplx s = 0.0;
    const auto& b = p.dist.nodes();
    const auto& m = p.dist.masses();
    for (std::size_t n = 0; n < b.size(); ++n) {
        const cplx den = 1.0 - b[n] + b[n] * z;
        s += m[n] * b[n] * (1.0 - b[n]) / (den * den);
    }
    return -1.0 / ((z - 1.0) * (z - 1.0)) + p.a * s;
}

double lln_moment_contour(int k, const ModelParams& p, const ContourSpec& c) {
    if (k < 1) throw std::invalid_argument("lln_moment_contour: k >= 1");
    const cplx v = contour_integral([&](cplx z) { return std::pow(curly_F(z, p), k + 1) / z; }, c) /
                   static_cast<double>(k + 1);
    return real_or_throw(v, 1e-10, "lln_moment_contour");
}

FFamily schur_family(double a, const WeightDistribution& d) {
    return FFamily(
        "schur", [a, d](const std::vector<Jet<2>>& x) { return schur_family_eval(x, a, d); },
        [a, d](const std::vector<Jet<4>>& x) { return schur_family_eval(x, a, d); });
}

FFamily factorized_family(double a, const WeightDistribution& d) {
    return FFamily(
        "factorized", [a, d](const std::vector<Jet<2>>& x) { return factorized_family_eval(x, a, d); },
        [a, d](const std::vector<Jet<4>>& x) { return factorized_family_eval(x, a, d); });
}

double lln_moment_general(int k, const FFamily& f) {
    if (k < 1) throw std::invalid_argument("lln_moment_general: k >= 1");
    cplx total = 0.0;
    for (int l = 0; l <= k; ++l) {
        const Jet1 dF = first_partial_on_roots(f, l, l);
        const Jet1 one_u = Jet1::variable({l}, 0, 1.0);
        const Jet1 expr = one_u.pow_int(k) * dF.pow_int(k - l);
        total += binomial(k, l) / factorial(l + 1) * expr.derivative({l});
    }
    return real_or_throw(total, 1e-9, "lln_moment_general");
}

double lln_moment_sanity(int k, double a, const WeightDistribution& d) {
    if (k < 1) throw std::invalid_argument("lln_moment_sanity: k >= 1");
    cplx total = 0.0;
    const auto& b = d.nodes();
    const auto& p = d.masses();
    for (int l = 0; l <= k; ++l) {
        const Jet1 u = Jet1::variable({l}, 0);
        Jet1 Fp({l});
        for (std::size_t n = 0; n < b.size(); ++n) Fp += (u * b[n] + 1.0).inverse() * (a * b[n] * p[n]);
        const Jet1 expr = (u + 1.0).pow_int(k) * Fp.pow_int(k - l);
        total += binomial(k, l) / factorial(l + 1) * expr.derivative({l});
    }
    return real_or_throw(total, 1e-12, "lln_moment_sanity");
}

std::vector<double> free_cumulants(int k_max, const FFamily& f) {
    if (k_max < 1 || k_max > kMaxFreeCumulant) throw std::invalid_argument("free_cumulants: 1 <= k_max <= 8");
    static const std::vector<double> B = bernoulli_plus(12);
    std::vector<double> out;
    for (int k = 1; k <= k_max; ++k) {
        const int ord = k - 1;
        const Jet2::Index o{ord, 1};
        const Jet2 v = Jet2::variable(o, 0), e = Jet2::variable(o, 1);
        const Jet2 ev = v.exp();
        std::vector<Jet2> args;
        args.push_back(ev + e);
        for (int j = 1; j <= k; ++j) {
            const cplx w = root_of_unity(k + 1, j);
            args.push_back(ev * w + (1.0 - w));
        }
        const Jet2 val = f(args);
        // [v^(k-1)] of e^v ∂₁F plus the Bernoulli tail of e^v/(e^v-1) - 1/v
        cplx c = 0.0;
        for (int i = 0; i <= ord; ++i) c += ev.coef({ord - i, 0}) * val.coef({i, 1});
        c += B[k] / factorial(k);
        out.push_back(real_or_throw(c, 1e-9, "free_cumulants"));
    }
    return out;
}

std::vector<double> free_cumulants(int k_max, const ModelParams& p) {
    return free_cumulants(k_max, schur_family(p.a, p.dist));
}

namespace {

// P[s][m] = Σ over compositions i_1+..+i_s = m of μ_{i_1}..μ_{i_s}, μ_0 = 1
double composition_sum(const std::vector<double>& mu, int s, int m) {
    std::vector<double> cur(m + 1, 0.0);
    cur[0] = 1.0;
    for (int t = 0; t < s; ++t) {
        std::vector<double> nxt(m + 1, 0.0);
        for (int x = 0; x <= m; ++x)
            for (int i = 0; i <= x; ++i) nxt[x] += mu[i] * cur[x - i];
        cur = std::move(nxt);
    }
    return cur[m];
}

}  // namespace

std::vector<double> moments_from_free_cumulants(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size());
    std::vector<double> mu(n + 1, 0.0);
    mu[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int t = 1; t <= m; ++t) s += c[t - 1] * composition_sum(mu, t, m - t);
        mu[m] = s;
    }
    return {mu.begin() + 1, mu.end()};
}

std::vector<double> free_cumulants_from_moments(const std::vector<double>& moments) {
    const int n = static_cast<int>(moments.size());
    std::vector<double> mu(n + 1, 1.0);
    for (int m = 1; m <= n; ++m) mu[m] = moments[m - 1];
    std::vector<double> c(n, 0.0);
    for (int m = 1; m <= n; ++m) {
        double s = mu[m];
        for (int t = 1; t < m; ++t) s -= c[t - 1] * composition_sum(mu, t, m - t);
        c[m - 1] = s;
    }
    return c;
}

// ---------------------------------------------------------------------------
// limit shape

LimitShapeSolver::LimitShapeSolver(const WeightDistribution& d, double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("limit shape: alpha must lie in (0,1)");
    a_ = 1.0 / alpha - 1.0;
    std::vector<std::pair<double, double>> qp;
    for (std::size_t n = 0; n < d.nodes().size(); ++n)
        if (d.masses()[n] > 0.0) qp.emplace_back(-(1.0 - d.nodes()[n]) / d.nodes()[n], d.masses()[n]);
    std::sort(qp.begin(), qp.end());
    for (const auto& [q, p] : qp) {
        if (!q_.empty() && std::abs(q - q_.back()) <= 1e-14 * std::abs(q)) {
            p_.back() += p;
            continue;
        }
        q_.push_back(q);
        p_.push_back(p);
    }

    const double inf = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(q_.size());
    for (int j = 0; j + 1 < n; ++j) intervals_.push_back({q_[j], q_[j + 1], 1});
    intervals_.push_back({q_[n - 1], 1.0, 0});
    intervals_.push_back({1.0, q_[0], 0});  // through infinity
    const int outer = static_cast<int>(intervals_.size()) - 1;

    struct Segment {
        double l, r, fl, fr;
        int id;
    };
    std::vector<Segment> segs;
    for (int j = 0; j + 1 < n; ++j) segs.push_back({q_[j], q_[j + 1], -inf, inf, j});
    segs.push_back({q_[n - 1], 1.0, -inf, -inf, n - 1});
    segs.push_back({1.0, inf, inf, 1.0 + a_, outer});
    segs.push_back({-inf, q_[0], 1.0 + a_, inf, outer});

    constexpr int kSamples = 64;
    for (const Segment& s : segs) {
        auto at = [&](double t) {
            if (std::isinf(s.r)) return s.l + t / (1.0 - t);
            if (std::isinf(s.l)) return s.r - (1.0 - t) / t;
            return s.l + (s.r - s.l) * t;
        };
        std::vector<double> crit;
        double tp = 0.0, dp = 0.0;
        for (int i = 0; i < kSamples; ++i) {
            const double t = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / kSamples));
            const double dv = dF(at(t));
            if (i > 0 && (dv > 0.0) != (dp > 0.0)) {
                double lo = tp, hi = t;
                const bool up = dp > 0.0;
                for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((dF(at(mid)) > 0.0) == up)
                        lo = mid;
                    else
                        hi = mid;
                }
                crit.push_back(at(0.5 * (lo + hi)));
            }
            tp = t;
            dp = dv;
        }
        double zl = s.l, fl = s.fl;
        for (double zc : crit) {
            const double fc = F(zc);
            pieces_.push_back({zl, zc, fl, fc, s.id});
            critical_.push_back(zc);
            zl = zc;
            fl = fc;
        }
        pieces_.push_back({zl, s.r, fl, s.fr, s.id});
    }
}

double LimitShapeSolver::F(double z) const {
    double s = 0.0;
    for (std::size_t j = 0; j < q_.size(); ++j) s += p_[j] * z / (z - q_[j]);
    return z / (z - 1.0) + a_ * s;
}

double LimitShapeSolver::dF(double z) const {
    double s = 0.0;
    for (std::size_t j = 0; j < q_.size(); ++j) s += p_[j] * (-q_[j]) / ((z - q_[j]) * (z - q_[j]));
    return -1.0 / ((z - 1.0) * (z - 1.0)) + a_ * s;
}

cplx LimitShapeSolver::F(cplx z) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < q_.size(); ++j) s += p_[j] * z / (z - q_[j]);
    return z / (z - 1.0) + a_ * s;
}

cplx LimitShapeSolver::dF(cplx z) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < q_.size(); ++j) s += p_[j] * (-q_[j]) / ((z - q_[j]) * (z - q_[j]));
    return -1.0 / ((z - 1.0) * (z - 1.0)) + a_ * s;
}

std::vector<double> LimitShapeSolver::double_root_levels() const {
    std::vector<double> out;
    for (double zc : critical_) out.push_back(alpha_ * F(zc));
    std::sort(out.begin(), out.end());
    return out;
}

bool LimitShapeSolver::newton(cplx& z, double target, int& iters, double& res) const {
    res = std::abs(F(z) - target);
    for (int it = 0; it < 100; ++it) {
        iters = it;
        if (res < 1e-13 * (1.0 + std::abs(target))) return true;
        const cplx d = dF(z);
        if (std::abs(d) == 0.0 || !std::isfinite(std::abs(d))) return false;
        const cplx step = (F(z) - target) / d;
        double lam = 1.0;
        bool moved = false;
        for (int h = 0; h < 40; ++h, lam *= 0.5) {
            cplx zn = z - lam * step;
            if (zn.imag() < 0.0) zn = std::conj(zn);
            const double rn = std::abs(F(zn) - target);
            if (std::isfinite(rn) && rn < res) {
                z = zn;
                res = rn;
                moved = true;
                break;
            }
        }
        if (!moved) return res < 1e-10;
    }
    return res < 1e-10;
}

double LimitShapeSolver::bisect(const Piece& pc, double target) const {
    auto at = [&](double t) {
        if (std::isinf(pc.hi_z)) return pc.lo_z + t / (1.0 - t);
        if (std::isinf(pc.lo_z)) return pc.hi_z - (1.0 - t) / t;
        return pc.lo_z + (pc.hi_z - pc.lo_z) * t;
    };
    const bool up = pc.hi_f > pc.lo_f;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((F(at(mid)) < target) == up)
            lo = mid;
        else
            hi = mid;
    }
    return at(0.5 * (lo + hi));
}

LimitShapePoint LimitShapeSolver::solve(double y, cplx hint) const {
    if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("limit shape: y must lie in (0,1)");
    const double target = y / alpha_;
    LimitShapePoint pt;
    pt.alpha = alpha_;
    pt.y = y;

    std::vector<int> count(intervals_.size(), 0);
    int real_roots = 0;
    for (const Piece& pc : pieces_) {
        const double lo = std::min(pc.lo_f, pc.hi_f), hi = std::max(pc.lo_f, pc.hi_f);
        if (target > lo && target < hi) {
            ++count[pc.interval];
            ++real_roots;
        }
    }
    const int degree = static_cast<int>(q_.size()) + 1;
    pt.upper_roots = std::max(0, (degree - real_roots) / 2);

    if (pt.upper_roots == 0) {
        int extra = -1;
        for (std::size_t i = 0; i < intervals_.size(); ++i)
            if (count[i] > intervals_[i].baseline) extra = static_cast<int>(i);
        if (extra < 0) throw std::runtime_error("limit shape: inconsistent real root count");
        std::vector<double> roots;
        for (const Piece& pc : pieces_) {
            if (pc.interval != extra) continue;
            const double lo = std::min(pc.lo_f, pc.hi_f), hi = std::max(pc.lo_f, pc.hi_f);
            if (target > lo && target < hi) roots.push_back(bisect(pc, target));
        }
        double z = roots[roots.size() / 2];
        for (double r : roots)
            if (r > 0.0) z = r;
        pt.z = z;
        pt.liquid = false;
        pt.density = z > 0.0 ? 0.0 : 1.0;
        pt.residual = std::abs(F(z) - target);
        return pt;
    }

    std::vector<cplx> seeds;
    if (hint.imag() > 0.0) seeds.push_back(hint);
    for (cplx s : {cplx(0, 1), cplx(0.5, 0.5), cplx(0, 2)}) seeds.push_back(s);
    auto try_seed = [&](cplx z) {
        int iters = 0;
        double res = 0.0;
        if (newton(z, target, iters, res) && z.imag() > 1e-8 && res < 1e-10) {
            pt.z = z;
            pt.iterations = iters;
            pt.residual = res;
            return true;
        }
        return false;
    };
    bool found = false;
    for (cplx s : seeds)
        if ((found = try_seed(s))) break;
    if (!found) {
        // coarse search of the upper half-plane, then polish the best cells
        std::vector<std::pair<double, cplx>> cells;
        for (int i = 0; i <= 60; ++i) {
            const double r = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
            for (int j = 1; j < 60; ++j) {
                const cplx z = std::polar(r, kPi * j / 60.0);
                const double v = std::abs(F(z) - target);
                if (std::isfinite(v)) cells.emplace_back(v, z);
            }
        }
        std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y2) { return x.first < y2.first; });
        for (std::size_t c = 0; c < std::min<std::size_t>(cells.size(), 12) && !found; ++c) found = try_seed(cells[c].second);
    }
    if (!found) {
        std::ostringstream os;
        os << "limit shape: no upper half-plane root at alpha=" << alpha_ << " y=" << y << " (real roots "
           << real_roots << " of " << degree << ")";
        throw std::runtime_error(os.str());
    }
    pt.liquid = true;
    pt.density = std::arg(pt.z) / kPi;
    return pt;
}

LimitShapePoint limit_shape_density(double alpha, double y, const WeightDistribution& d) {
    return LimitShapeSolver(d, alpha).solve(y);
}

LimitShapeGrid limit_shape_grid(const WeightDistribution& d, int n, int workers) {
    if (n < 1) throw std::invalid_argument("limit_shape_grid: n >= 1");
    LimitShapeGrid g;
    g.n = n;
    g.points.resize(static_cast<std::size_t>(n) * n);
    auto row = [&](int i) {
        const LimitShapeSolver solver(d, (i + 0.5) / n);
        cplx hint = 0.0;
        for (int j = 0; j < n; ++j) {
            LimitShapePoint pt = solver.solve((j + 0.5) / n, hint);
            hint = pt.liquid ? pt.z : cplx(0.0, 0.0);
            g.points[static_cast<std::size_t>(i) * n + j] = pt;
        }
    };
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) row(i);
        return g;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) row(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return g;
}

std::vector<ArcticPoint> arctic_curve(const WeightDistribution& d, int n_points) {
    if (n_points < 2) throw std::invalid_argument("arctic_curve: n_points >= 2");
    std::vector<double> q, p;
    for (std::size_t j = 0; j < d.nodes().size(); ++j) {
        if (d.masses()[j] <= 0.0) continue;
        q.push_back(-(1.0 - d.nodes()[j]) / d.nodes()[j]);
        p.push_back(d.masses()[j]);
    }
    std::vector<std::size_t> ord(q.size());
    for (std::size_t j = 0; j < ord.size(); ++j) ord[j] = j;
    std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) { return q[x] < q[y]; });
    std::vector<double> qs, ps;
    for (std::size_t j : ord) {
        if (!qs.empty() && std::abs(q[j] - qs.back()) <= 1e-14 * std::abs(q[j])) {
            ps.back() += p[j];
            continue;
        }
        qs.push_back(q[j]);
        ps.push_back(p[j]);
    }

    std::vector<ArcticPoint> out;
    auto add = [&](double z) {
        double env = 0.0, fenv = 0.0;
        for (std::size_t j = 0; j < qs.size(); ++j) {
            env += ps[j] * (-qs[j]) / ((z - qs[j]) * (z - qs[j]));
            fenv += ps[j] * z / (z - qs[j]);
        }
        if (std::abs(env) < 1e-14 || !std::isfinite(env)) return;
        const double a = 1.0 / ((z - 1.0) * (z - 1.0) * env);
        const double alpha = 1.0 / (1.0 + a);
        const double y = alpha * (z / (z - 1.0) + a * fenv);
        if (std::isfinite(alpha) && std::isfinite(y)) out.push_back({alpha, y, z});
    };

    struct Seg {
        double l, r;
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Seg> segs;
    for (std::size_t j = 0; j + 1 < qs.size(); ++j) segs.push_back({qs[j], qs[j + 1]});
    segs.push_back({qs.back(), 1.0});
    segs.push_back({1.0, inf});
    segs.push_back({-inf, qs.front()});
    const int per = std::max(2, n_points / static_cast<int>(segs.size()));
    for (const Seg& s : segs)
        for (int i = 0; i < per; ++i) {
            const double t = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / per));
            if (std::isinf(s.r))
                add(s.l + t / (1.0 - t));
            else if (std::isinf(s.l))
                add(s.r - (1.0 - t) / t);
            else
                add(s.l + (s.r - s.l) * t);
        }
    add(0.0);
    // z = ∞
    double env_inf = 0.0;
    for (std::size_t j = 0; j < qs.size(); ++j) env_inf += ps[j] * (-qs[j]);
    {
        const double a = 1.0 / env_inf;
        out.push_back({1.0 / (1.0 + a), 1.0, inf});
    }
    std::sort(out.begin(), out.end(), [](const ArcticPoint& x, const ArcticPoint& y) {
        return x.alpha != y.alpha ? x.alpha < y.alpha : x.y < y.y;
    });
    return out;
}

// ---------------------------------------------------------------------------
// fluctuations

double clt_cov_fixed(int k, int l, const ModelParams& p, CltForm form, double eps, int nodes) {
    if (k < 1 || l < 1) throw std::invalid_argument("clt_cov_fixed: k, l >= 1");
    const double c = form == CltForm::ACarrying ? p.a : 1.0;
    const auto& b = p.dist.nodes();
    const auto& m = p.dist.masses();
    // I_k(g) = (1/2πi)∮ B(z)^k g(z) dz with B(z) = 1/z + 1 + (1+z) c 𝖥(1+z);
    // the kernel 𝖦 = E[r r] - 𝖥𝖥 with r(z) = b/(1+bz) separates the double integral
    auto moments = [&](int power, double radius) {
        std::vector<cplx> per(b.size(), 0.0);
        cplx mean = 0.0;
        for (int j = 0; j < nodes; ++j) {
            const cplx z = std::polar(radius, 2.0 * kPi * (j + 0.5) / nodes);
            cplx F = 0.0;
            std::vector<cplx> r(b.size());
            for (std::size_t n = 0; n < b.size(); ++n) {
                r[n] = b[n] / (1.0 + b[n] * z);
                F += m[n] * r[n];
            }
            const cplx w = std::pow(1.0 / z + 1.0 + (1.0 + z) * c * F, power) * z;
            for (std::size_t n = 0; n < b.size(); ++n) per[n] += w * r[n];
            mean += w * F;
        }
        for (auto& v : per) v /= static_cast<double>(nodes);
        mean /= static_cast<double>(nodes);
        return std::make_pair(per, mean);
    };
    const auto [pz, fz] = moments(k, eps);
    const auto [pw, fw] = moments(l, 2.0 * eps);
    cplx v = -fz * fw;
    for (std::size_t n = 0; n < b.size(); ++n) v += m[n] * pz[n] * pw[n];
    if (form == CltForm::ACarrying) v *= p.a;
    return real_or_throw(v, 1e-9, "clt_cov_fixed");
}

double clt_cov_general(int k, int l, const FFamily& f) {
    if (k < 1 || l < 1) throw std::invalid_argument("clt_cov_general: k, l >= 1");
    cplx total = 0.0;
    for (int q = 0; q < k; ++q)
        for (int r = 0; r < l; ++r) {
            const Jet<4>::Index o{q, r, 1, 1};
            const auto x1 = Jet<4>::variable(o, 0), x2 = Jet<4>::variable(o, 1);
            const auto e1 = Jet<4>::variable(o, 2), e2 = Jet<4>::variable(o, 3);
            std::vector<Jet<4>> both{x1 + e1 + 1.0, x2 + e2 + 1.0}, first{x1 + e1 + 1.0}, second{x2 + e2 + 1.0};
            for (int j = 1; j <= q; ++j) {
                const auto arg = x1 * root_of_unity(q + 1, j) + 1.0;
                both.push_back(arg);
                first.push_back(arg);
            }
            for (int j = 1; j <= r; ++j) {
                const auto arg = x2 * root_of_unity(r + 1, j) + 1.0;
                both.push_back(arg);
                second.push_back(arg);
            }
            const Jet2 A = project(f(both), 1, 1);
            const Jet2 B1 = project(f(first), 1, 0);
            const Jet2 B2 = project(f(second), 0, 1);
            const Jet2::Index o2{q, r};
            const Jet2 X1 = Jet2::variable(o2, 0, 1.0), X2 = Jet2::variable(o2, 1, 1.0);
            const Jet2 expr = (A - B1 * B2) * X1.pow_int(k) * B1.pow_int(k - 1 - q) * X2.pow_int(l) *
                              B2.pow_int(l - 1 - r);
            total += static_cast<double>(k * l) / (factorial(q + 1) * factorial(r + 1)) * binomial(l - 1, r) *
                     binomial(k - 1, q) * expr.derivative({q, r});
        }
    return real_or_throw(total, 1e-9, "clt_cov_general");
}

namespace {

// (1/(2πi)²) ∮_{|z|=eps} ∮_{|w|=2eps} f(z,w) dz dw, z integrated first
cplx double_trapezoid(const std::function<cplx(cplx, cplx)>& f, double eps, int nodes) {
    std::vector<cplx> zs(nodes), ws(nodes);
    for (int j = 0; j < nodes; ++j) {
        zs[j] = std::polar(eps, 2.0 * kPi * (j + 0.5) / nodes);
        ws[j] = std::polar(2.0 * eps, 2.0 * kPi * (j + 0.5) / nodes);
    }
    cplx outer = 0.0;
    for (cplx w : ws) {
        cplx inner = 0.0;
        for (cplx z : zs) inner += f(z, w) * z;
        outer += inner / static_cast<double>(nodes) * w;
    }
    return outer / static_cast<double>(nodes);
}

}  // namespace

double clt_cov_critical(int k1, int k2, double alpha1, double alpha2, double beta, double sigma, double eps,
                        int nodes) {
    if (k1 < 1 || k2 < 1) throw std::invalid_argument("clt_cov_critical: k >= 1");
    if (!(alpha1 > 0.0 && alpha1 < 1.0 && alpha2 > 0.0 && alpha2 < 1.0))
        throw std::invalid_argument("clt_cov_critical: levels must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0) || sigma < 0.0) throw std::invalid_argument("clt_cov_critical: bad beta/sigma");
    if (alpha1 > alpha2) {
        std::swap(alpha1, alpha2);
        std::swap(k1, k2);
    }
    const double c1 = (1.0 - alpha1) * beta / alpha1, c2 = (1.0 - alpha2) * beta / alpha2;
    const double env = (1.0 - alpha2) * sigma * sigma;
    const cplx v = double_trapezoid(
        [&](cplx z, cplx w) {
            const cplx bz = 1.0 / z + 1.0 + (1.0 + z) * c1 / (1.0 + beta * z);
            const cplx bw = 1.0 / w + 1.0 + (1.0 + w) * c2 / (1.0 + beta * w);
            const cplx dz = 1.0 + beta * z, dw = 1.0 + beta * w;
            return std::pow(bz, k1) * std::pow(bw, k2) * (env / (dz * dz * dw * dw) + 1.0 / ((z - w) * (z - w)));
        },
        eps, nodes);
    return std::pow(alpha1, k1) * std::pow(alpha2, k2) * real_or_throw(v, 1e-9, "clt_cov_critical");
}

double clt_cov_bg2(int k1, int k2, const std::function<cplx(cplx)>& F, const std::function<cplx(cplx, cplx)>& G,
                   double eps, int nodes) {
    if (k1 < 1 || k2 < 1) throw std::invalid_argument("clt_cov_bg2: k >= 1");
    const cplx v = double_trapezoid(
        [&](cplx z, cplx w) {
            const cplx bz = 1.0 / z + 1.0 + (1.0 + z) * F(1.0 + z);
            const cplx bw = 1.0 / w + 1.0 + (1.0 + w) * F(1.0 + w);
            cplx kern = 1.0 / ((z - w) * (z - w));
            if (G) kern += G(1.0 + z, 1.0 + w);
            return std::pow(bz, k1) * std::pow(bw, k2) * kern;
        },
        eps, nodes);
    return real_or_throw(v, 1e-9, "clt_cov_bg2");
}

// ---------------------------------------------------------------------------
// symmetrization lemmas

namespace {

using cld = std::complex<long double>;

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

struct RandomG {
    std::vector<double> c;  // polynomial part
    double d0, d1, d2;      // exponential part

    // G(u1; rest) = c0 + c1 u1 + c2 u1² + c3 p1 + c4 u1 p1 + c5 p2 + c6 p1² + c7 u1³ + c8 u1² p1
    //               + exp(d0 u1 + d1 p1 + d2 u1 p2)
    template <class T, class S>
    T eval(const T& u1, const std::vector<T>& rest, const S& one) const {
        T p1 = u1 * S(0), p2 = u1 * S(0);
        for (const T& x : rest) {
            p1 = p1 + x;
            p2 = p2 + x * x;
        }
        T poly = u1 * S(c[1]) + one * S(c[0]) + u1 * u1 * S(c[2]) + p1 * S(c[3]) + u1 * p1 * S(c[4]) + p2 * S(c[5]) +
                 p1 * p1 * S(c[6]) + u1 * u1 * u1 * S(c[7]) + u1 * u1 * p1 * S(c[8]);
        return poly + expo(u1 * S(d0) + p1 * S(d1) + u1 * p2 * S(d2));
    }
    static cld expo(const cld& x) { return std::exp(x); }
    static Jet1 expo(const Jet1& x) { return x.exp(); }
};

cld lhs_sym(const RandomG& g, int m, long double eps) {
    const long double tau = 2.0L * std::numbers::pi_v<long double> / (m + 1);
    std::vector<cld> u(m + 1);
    for (int i = 0; i <= m; ++i) u[i] = std::polar(eps, tau * i);
    cld s = 0.0L;
    for (int i = 0; i <= m; ++i) {
        std::vector<cld> rest;
        cld den = 1.0L;
        for (int j = 0; j <= m; ++j)
            if (j != i) {
                rest.push_back(u[j]);
                den *= u[i] - u[j];
            }
        s += g.eval(u[i], rest, cld(1.0L)) / den;
    }
    return s;
}

cplx rhs_sym(const RandomG& g, int m) {
    const Jet1 u = Jet1::variable({m}, 0);
    std::vector<Jet1> rest;
    for (int j = 1; j <= m; ++j) rest.push_back(u * root_of_unity(m + 1, j));
    return g.eval(u, rest, cplx(1.0)).coef({m});
}

}  // namespace

LemmaReport lemma_property_tests(std::uint64_t seed) {
    LemmaReport rep;
    SplitMix64 rng(seed);
    auto unif = [&] { return 2.0 * rng.uniform() - 1.0; };

    // G = u1, m = 1: both sides equal 1
    {
        RandomG g{std::vector<double>(9, 0.0), 0, 0, 0};
        g.c[1] = 1.0;
        const double l = std::abs(lhs_sym(g, 1, 1e-2L) - cld(1.0L));
        const double r = std::abs(rhs_sym(g, 1) - 1.0);
        rep.symmetrization_max_rel = std::max({rep.symmetrization_max_rel, l, r});
    }
    for (int m = 1; m <= 5; ++m)
        for (int trial = 0; trial < 50; ++trial) {
            RandomG g{std::vector<double>(9), 0, 0, 0};
            for (auto& c : g.c) c = unif();
            g.d0 = unif();
            g.d1 = unif();
            g.d2 = unif();
            const cld l1 = lhs_sym(g, m, 1e-2L), l2 = lhs_sym(g, m, 5e-3L);
            const long double f = std::pow(2.0L, m + 1);
            const cld lr = (f * l2 - l1) / (f - 1.0L);
            const cplx rhs = rhs_sym(g, m);
            const double err = std::abs(cplx(static_cast<double>(lr.real()), static_cast<double>(lr.imag())) - rhs) /
                               std::max(1.0, std::abs(rhs));
            rep.symmetrization_max_rel = std::max(rep.symmetrization_max_rel, err);
        }
    const bool sym_ok = rep.symmetrization_max_rel < 1e-5;
    rep.lines.push_back(std::string("symmetrization identity, m <= 5, 250 random G: max rel err ") +
                        sci(rep.symmetrization_max_rel) + (sym_ok ? " ok" : " FAIL"));

    // constant-free symmetric polynomials of degree < m vanish at the m-th roots of unity
    auto power_sum = [](int m, int k) {
        cplx s = 0.0;
        for (int j = 0; j < m; ++j) s += std::pow(root_of_unity(m, j), k);
        return s;
    };
    {
        // p1 at m = 2..8 and e2 at m = 3
        for (int m = 2; m <= 8; ++m) rep.roots_max_abs = std::max(rep.roots_max_abs, std::abs(power_sum(m, 1)));
        const cplx e2 = 0.5 * (power_sum(3, 1) * power_sum(3, 1) - power_sum(3, 2));
        rep.roots_max_abs = std::max(rep.roots_max_abs, std::abs(e2));
    }
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng.next() % 7);
        // random combination of products p_{k1} p_{k2} p_{k3} with 1 <= k1+k2+k3 < m
        cplx v = 0.0;
        for (int k1 = 1; k1 < m; ++k1)
            for (int k2 = 0; k1 + k2 < m; ++k2)
                for (int k3 = 0; k1 + k2 + k3 < m; ++k3) {
                    cplx term = unif() * power_sum(m, k1);
                    if (k2) term *= power_sum(m, k2);
                    if (k3) term *= power_sum(m, k3);
                    v += term;
                }
        rep.roots_max_abs = std::max(rep.roots_max_abs, std::abs(v));
    }
    const bool roots_ok = rep.roots_max_abs < 1e-10;
    rep.lines.push_back(std::string("roots-of-unity vanishing, 100 random symmetric polynomials: max |P| ") +
                        sci(rep.roots_max_abs) + (roots_ok ? " ok" : " FAIL"));

    bool eig_ok = true;
    const std::vector<Signature> lams{{0}, {2}, {1, 0}, {3, 1}, {2, 2}, {2, 1, 0}, {4, 2, 1}, {1, 1, 1}};
    for (const Signature& lam : lams)
        for (int k = 1; k <= 2; ++k) {
            const EigenCheck c = dk_eigenrelation_check(lam, k, seed + static_cast<std::uint64_t>(k));
            rep.eigen_max_abs = std::max(rep.eigen_max_abs, std::abs(c.eigenvalue - c.expected));
            eig_ok = eig_ok && c.ok;
        }
    rep.lines.push_back(std::string("D_k eigenrelation, N <= 3, k <= 2: max abs err ") +
                        sci(rep.eigen_max_abs) + (eig_ok ? " ok" : " FAIL"));
    rep.ok = sym_ok && roots_ok && eig_ok;
    return rep;
}

}  // namespace aztec
