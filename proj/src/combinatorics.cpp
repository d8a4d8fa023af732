#include "combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "rng.hpp"

namespace aztec {

bool is_signature(const Signature& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i - 1] < s[i]) return false;
    return true;
}

long long signature_size(const Signature& s) {
    return std::accumulate(s.begin(), s.end(), 0LL);
}

std::string to_string(const Signature& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ')';
    return os.str();
}

std::string to_string(const SignatureSequence& seq) {
    std::ostringstream os;
    for (int t = seq.M; t >= 1; --t) {
        os << "l" << t << "=" << to_string(seq.lambdas[t]) << " u" << t << "=" << to_string(seq.upsilons[t]);
        if (t > 1) os << ' ';
    }
    return os.str();
}

bool interlace_check(const Signature& a, const Signature& b, Interlace mode) {
    if (mode == Interlace::Vertical) {
        if (a.size() != b.size()) throw std::invalid_argument("vertical interlacing needs equal lengths");
        if (!is_signature(a) || !is_signature(b)) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            int d = b[i] - a[i];
            if (d != 0 && d != 1) return false;
        }
        return true;
    }
    if (a.size() + 1 != b.size()) throw std::invalid_argument("horizontal interlacing needs len(a) = len(b) - 1");
    if (!is_signature(a) || !is_signature(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(b[i] >= a[i] && a[i] >= b[i + 1])) return false;
    return true;
}

Rational schur_at_ones(const Signature& lam, int N) {
    if (static_cast<int>(lam.size()) != N) throw std::invalid_argument("schur_at_ones: length mismatch");
    Rational r = 1;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) r *= Rational(lam[i] - lam[j] + j - i, j - i);
    r.canonicalize();
    return r;
}

double schur_at_ones_double(const Signature& lam) {
    const int N = static_cast<int>(lam.size());
    double r = 1.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) r *= static_cast<double>(lam[i] - lam[j] + j - i) / (j - i);
    return r;
}

std::complex<double> schur_eval(const Signature& lam, const std::vector<std::complex<double>>& xs) {
    const int N = static_cast<int>(lam.size());
    if (static_cast<int>(xs.size()) != N) throw std::invalid_argument("schur_eval: need len(xs) = len(lam)");
    if (N == 0) return 1.0;
    std::complex<double> vand = 1.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            auto d = xs[i] - xs[j];
            if (std::abs(d) < 1e-12)
                throw std::domain_error("schur_eval: coincident points; perturb them or use schur_at_ones");
            vand *= d;
        }
    Eigen::MatrixXcd A(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = std::pow(xs[i], lam[j] + N - 1 - j);
    return A.partialPivLu().determinant() / vand;
}

double schur_eval_jacobi_trudi(const Signature& lam, const std::vector<double>& xs) {
    if (lam.empty() || lam[0] == 0) return 1.0;
    const int n = static_cast<int>(xs.size());
    // conjugate partition
    const int width = lam[0];
    std::vector<int> conj(width, 0);
    for (int part : lam)
        for (int c = 0; c < part; ++c) ++conj[c];
    if (conj[0] > n) return 0.0;
    // elementary symmetric polynomials e_0..e_n
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (double x : xs)
        for (int k = n; k >= 1; --k) e[k] += x * e[k - 1];
    auto ek = [&](int k) { return (k < 0 || k > n) ? 0.0 : e[k]; };
    Eigen::MatrixXd A(width, width);
    for (int i = 0; i < width; ++i)
        for (int j = 0; j < width; ++j) A(i, j) = ek(conj[i] - i + j);
    return A.partialPivLu().determinant();
}

namespace {

Rational rpow(const Rational& x, long long n) {
    Rational r = 1;
    for (long long i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace

Rational kappa_coefficient(const Signature& lam, const Signature& ups, const Rational& beta) {
    if (!interlace_check(lam, ups, Interlace::Vertical)) return 0;
    const int t = static_cast<int>(lam.size());
    const long long d = signature_size(ups) - signature_size(lam);
    Rational r = rpow(beta, d) * rpow(1 - beta, t - d) * schur_at_ones(ups, t) / schur_at_ones(lam, t);
    r.canonicalize();
    return r;
}

double kappa_coefficient(const Signature& lam, const Signature& ups, double beta) {
    if (!interlace_check(lam, ups, Interlace::Vertical)) return 0.0;
    const int t = static_cast<int>(lam.size());
    const long long d = signature_size(ups) - signature_size(lam);
    return std::pow(beta, static_cast<double>(d)) * std::pow(1.0 - beta, static_cast<double>(t - d)) *
           schur_at_ones_double(ups) / schur_at_ones_double(lam);
}

Rational pr_coefficient(const Signature& ups, const Signature& lam) {
    if (!interlace_check(lam, ups, Interlace::Horizontal)) return 0;
    const int t = static_cast<int>(ups.size());
    Rational r = schur_at_ones(lam, t - 1) / schur_at_ones(ups, t);
    r.canonicalize();
    return r;
}

double pr_coefficient_double(const Signature& ups, const Signature& lam) {
    if (!interlace_check(lam, ups, Interlace::Horizontal)) return 0.0;
    return schur_at_ones_double(lam) / schur_at_ones_double(ups);
}

bool is_valid_sequence(const SignatureSequence& seq) {
    const int M = seq.M;
    if (M < 0 || static_cast<int>(seq.lambdas.size()) != M + 1 || static_cast<int>(seq.upsilons.size()) != M + 1)
        return false;
    for (int t = 0; t <= M; ++t) {
        if (static_cast<int>(seq.lambdas[t].size()) != t) return false;
        if (t >= 1 && static_cast<int>(seq.upsilons[t].size()) != t) return false;
        if (!is_signature(seq.lambdas[t]) || (t >= 1 && !is_signature(seq.upsilons[t]))) return false;
    }
    for (int v : seq.lambdas[M])
        if (v != 0) return false;
    for (int t = 1; t <= M; ++t) {
        if (!interlace_check(seq.lambdas[t], seq.upsilons[t], Interlace::Vertical)) return false;
        if (!interlace_check(seq.lambdas[t - 1], seq.upsilons[t], Interlace::Horizontal)) return false;
    }
    return true;
}

Rational sequence_probability_closed_form(const SignatureSequence& seq, const std::vector<Rational>& betas) {
    Rational r = 1;
    for (int t = 1; t <= seq.M; ++t) {
        const Rational& b = betas[t - 1];
        const long long n = signature_size(seq.upsilons[t]) - signature_size(seq.lambdas[t]);
        r *= rpow(1 - b, t) * rpow(b / (1 - b), n);
    }
    r.canonicalize();
    return r;
}

SequenceProbability sequence_probability(const SignatureSequence& seq, const std::vector<Rational>& betas) {
    if (static_cast<int>(betas.size()) != seq.M) throw std::invalid_argument("sequence_probability: need M betas");
    if (!is_valid_sequence(seq)) return {Rational(0), false};
    Rational r = 1;
    for (int t = seq.M; t >= 1; --t) {
        r *= kappa_coefficient(seq.lambdas[t], seq.upsilons[t], betas[t - 1]);
        r *= pr_coefficient(seq.upsilons[t], seq.lambdas[t - 1]);
    }
    r.canonicalize();
    if (r != sequence_probability_closed_form(seq, betas))
        throw std::logic_error("sequence_probability: product form and closed form disagree");
    return {r, true};
}

mpz_class moments_pk(const Signature& lam, int k) {
    if (k < 1) throw std::invalid_argument("moments_pk: k >= 1");
    const int N = static_cast<int>(lam.size());
    mpz_class s = 0;
    for (int i = 0; i < N; ++i) {
        mpz_class v = lam[i] + N - 1 - i, p;
        mpz_pow_ui(p.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(k));
        s += p;
    }
    return s;
}

double moments_pk_double(const Signature& lam, int k) {
    const int N = static_cast<int>(lam.size());
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += std::pow(static_cast<double>(lam[i] + N - 1 - i), k);
    return s;
}

std::vector<double> empirical_measure(const Signature& lam) {
    const int N = static_cast<int>(lam.size());
    std::vector<double> atoms(N);
    for (int i = 0; i < N; ++i) atoms[i] = static_cast<double>(lam[i] + N - 1 - i) / N;
    return atoms;
}

std::vector<Signature> vertical_successors(const Signature& lam) {
    const int t = static_cast<int>(lam.size());
    std::vector<Signature> out;
    Signature cur(lam);
    // choose ε_i left to right; υ_i ≤ υ_{i-1} is the only constraint
    auto rec = [&](auto&& self, int i) -> void {
        if (i == t) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= 1; ++e) {
            cur[i] = lam[i] + e;
            if (i > 0 && cur[i] > cur[i - 1]) continue;
            self(self, i + 1);
        }
        cur[i] = lam[i];
    };
    rec(rec, 0);
    return out;
}

std::vector<Signature> interlacing_predecessors(const Signature& ups) {
    const int t = static_cast<int>(ups.size());
    std::vector<Signature> out;
    if (t == 0) return out;
    Signature cur(t - 1, 0);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == t - 1) {
            out.push_back(cur);
            return;
        }
        for (int v = ups[i + 1]; v <= ups[i]; ++v) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

std::vector<SignatureSequence> enumerate_sequences(int M) {
    if (M < 0 || M > 5) throw std::invalid_argument("enumerate_sequences: M must be in [0,5]");
    std::vector<SignatureSequence> out;
    SignatureSequence seq;
    seq.M = M;
    seq.lambdas.assign(M + 1, {});
    seq.upsilons.assign(M + 1, {});
    seq.lambdas[M] = Signature(M, 0);
    auto rec = [&](auto&& self, int t) -> void {
        if (t == 0) {
            out.push_back(seq);
            return;
        }
        for (auto& ups : vertical_successors(seq.lambdas[t])) {
            seq.upsilons[t] = ups;
            for (auto& lam : interlacing_predecessors(ups)) {
                seq.lambdas[t - 1] = lam;
                self(self, t - 1);
            }
        }
    };
    rec(rec, M);
    return out;
}

namespace {

using cld = std::complex<long double>;

// alternant det[u_i^{l_j}] for N ≤ 3 by the Leibniz formula
cld alternant(const std::vector<int>& l, const std::vector<cld>& u) {
    const int N = static_cast<int>(l.size());
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    cld total = 0;
    do {
        int inversions = 0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                if (perm[i] > perm[j]) ++inversions;
        cld term = (inversions % 2) ? -1.0L : 1.0L;
        for (int i = 0; i < N; ++i) term *= std::pow(u[i], l[perm[i]]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace

EigenCheck dk_eigenrelation_check(const Signature& lam, int k, std::uint64_t seed) {
    const int N = static_cast<int>(lam.size());
    if (N < 1 || N > 3 || k < 1 || k > 3) throw std::invalid_argument("dk_eigenrelation_check: N <= 3, 1 <= k <= 3");
    std::vector<int> shifted(N);
    for (int i = 0; i < N; ++i) shifted[i] = lam[i] + N - 1 - i;
    SplitMix64 rng(seed);
    std::vector<cld> u(N);
    for (int attempt = 0;; ++attempt) {
        for (auto& x : u) {
            long double r = 0.7L + 0.6L * rng.uniform(), th = 6.283185307179586L * rng.uniform();
            x = std::polar(r, th);
        }
        long double sep = 1.0L;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) sep = std::min(sep, std::abs(u[i] - u[j]));
        if (sep > 0.2L && std::abs(alternant(shifted, u)) > 1e-3L) break;
        if (attempt > 1000) throw std::runtime_error("dk_eigenrelation_check: no generic point found");
    }
    const cld base = alternant(shifted, u);
    // (u_i ∂_i)^k g = d^k/dt^k g(..., u_i e^t, ...) at t = 0
    auto directional = [&](int i, long double h) {
        auto g = [&](long double t) {
            auto v = u;
            v[i] *= std::exp(t);
            return alternant(shifted, v);
        };
        switch (k) {
            case 1: return (g(h) - g(-h)) / (2 * h);
            case 2: return (g(h) - 2.0L * base + g(-h)) / (h * h);
            default: return (g(2 * h) - 2.0L * g(h) + 2.0L * g(-h) - g(-2 * h)) / (2 * h * h * h);
        }
    };
    const long double h = 1e-3L;
    cld total = 0;
    for (int i = 0; i < N; ++i) total += (4.0L * directional(i, h / 2) - directional(i, h)) / 3.0L;
    cld ratio = total / base;
    double expected = moments_pk_double(lam, k);
    EigenCheck res;
    res.eigenvalue = static_cast<double>(ratio.real());
    res.expected = expected;
    res.ok = std::abs(ratio - cld(expected)) < 1e-6L;
    return res;
}

}  // namespace aztec
