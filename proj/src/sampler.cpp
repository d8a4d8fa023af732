#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace aztec {

namespace {

constexpr std::uint8_t kTop = 1, kBottom = 2, kLeft = 4, kRight = 8;
constexpr std::uint8_t kClaimed = kTop | kBottom | kLeft | kRight;  // hole awaiting a pair

// Urban renewal on every face followed by the shift to the next smaller
// diamond. Arrays are n*n with stride n on input.
template <class Num>
std::vector<std::vector<Num>> reduce_faces(int M, std::vector<Num> T, std::vector<Num> B, std::vector<Num> L,
                                           std::vector<Num> R, bool rescale) {
    std::vector<std::vector<Num>> prob(M + 1);
    for (int n = M; n >= 1; --n) {
        const std::size_t sz = static_cast<std::size_t>(n) * n;
        std::vector<Num> delta(sz);
        prob[n].resize(sz);
        for (std::size_t k = 0; k < sz; ++k) {
            delta[k] = T[k] * B[k] + L[k] * R[k];
            prob[n][k] = T[k] * B[k] / delta[k];
        }
        if (n == 1) break;
        const int m = n - 1;
        std::vector<Num> T2(static_cast<std::size_t>(m) * m), B2(T2.size()), L2(T2.size()), R2(T2.size());
        auto idx = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const std::size_t k = static_cast<std::size_t>(a) * m + b;
                T2[k] = T[idx(a + 1, b + 1)] / delta[idx(a + 1, b + 1)];
                B2[k] = B[idx(a, b)] / delta[idx(a, b)];
                R2[k] = R[idx(a + 1, b)] / delta[idx(a + 1, b)];
                L2[k] = L[idx(a, b + 1)] / delta[idx(a, b + 1)];
            }
        if constexpr (std::is_same_v<Num, double>) {
            if (rescale) {
                double big = 0.0;
                for (auto* v : {&T2, &B2, &L2, &R2})
                    for (double x : *v) big = std::max(big, x);
                for (auto* v : {&T2, &B2, &L2, &R2})
                    for (double& x : *v) x /= big;
            }
        }
        T = std::move(T2), B = std::move(B2), L = std::move(L2), R = std::move(R2);
    }
    return prob;
}

// Face masks live in a zero-padded grid so that neighbours of border faces
// read as empty; rows carry slack so 8-byte loads and stores stay in bounds.
int grid_stride(int M) { return (M + 2 + 7) / 8 * 8 + 8; }
std::size_t cell(int a, int b, int stride) { return static_cast<std::size_t>(a + 1) * stride + (b + 1); }

constexpr std::uint64_t kOnes = 0x0101010101010101ULL;

std::uint64_t load8(const std::uint8_t* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return v;
}

// Slides level n-1 dominos into the level-n grid, cancels colliding pairs and
// claims the holes, listing them in `holes.list`. Entries of `old` outside the
// level-(n-1) region must be zero; the same then holds for `cur` at level n.
struct Holes {
    std::vector<int> list;  // claimed faces as grid offsets, in claiming order
    std::vector<int> candidates;
    std::vector<int> bucket_start;
};

void advance(const std::vector<std::uint8_t>& old, std::vector<std::uint8_t>& cur, int n, int stride,
             Holes& holes) {
    for (int a = 0; a < n; ++a) {
        const std::uint8_t* up = &old[cell(a - 1, 0, stride)];
        const std::uint8_t* here = &old[cell(a, 0, stride)];
        std::uint8_t* row = &cur[cell(a, 0, stride)];
        for (int b = 0; b < n; b += 8) {
            std::uint64_t m = (load8(up + b - 1) & (kOnes * kTop)) | (load8(here + b) & (kOnes * kBottom)) |
                              (load8(here + b - 1) & (kOnes * kLeft)) | (load8(up + b) & (kOnes * kRight));
            const std::uint64_t tb = m & m >> 1 & kOnes;       // top and bottom both arrived
            const std::uint64_t lr = m >> 2 & m >> 3 & kOnes;  // left and right both arrived
            m &= ~(tb * (kTop | kBottom) | lr * (kLeft | kRight));
            std::memcpy(row + b, &m, 8);
        }
    }
    // Holes are disjoint aligned blocks, but candidate faces overlap. Claiming
    // greedily by the block's top-left cell in reading order (a+b descending,
    // then a-b ascending) recovers the true decomposition. Candidates are
    // bucketed by a+b; row-major collection keeps each bucket sorted by a.
    auto is_free = [&](std::size_t k) {
        return !cur[k] && !(cur[k + 1] & (kBottom | kRight)) && !(cur[k + stride] & (kBottom | kLeft)) &&
               !(cur[k - stride] & (kTop | kRight)) && !(cur[k - 1] & (kTop | kLeft));
    };
    auto& cand = holes.candidates;
    auto& start = holes.bucket_start;
    cand.clear();
    start.assign(2 * n + 1, 0);
    for (int a = 0; a < n; ++a) {
        const std::uint8_t* row = &cur[cell(a, 0, stride)];
        for (int b = 0; b < n; b += 8) {
            const std::uint64_t v = load8(row + b);
            if (!((v - kOnes) & ~v & (kOnes << 7))) continue;  // no zero byte
            for (int j = b; j < std::min(b + 8, n); ++j)
                if (is_free(cell(a, j, stride))) {
                    cand.push_back(static_cast<int>(cell(a, j, stride)));
                    ++start[2 * n - 2 - (a + j) + 1];
                }
        }
    }
    for (int s = 1; s <= 2 * n; ++s) start[s] += start[s - 1];
    auto& list = holes.list;
    list.resize(cand.size());
    for (int k : cand) {
        const int s = k / stride + k % stride - 2;
        list[start[2 * n - 2 - s]++] = k;
    }
    std::size_t kept = 0;
    for (int k : list)
        if (is_free(static_cast<std::size_t>(k))) {
            cur[k] = kClaimed;
            list[kept++] = k;
        }
    list.resize(kept);
}

Tiling masks_to_tiling(const std::vector<std::uint8_t>& masks, int M) {
    Tiling t;
    t.M = M;
    t.dominos.reserve(static_cast<std::size_t>(M) * (M + 1));
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            const std::uint8_t m = masks[cell(a, b, grid_stride(M))];
            if (!m) continue;
            const int px = a - b, py = a + b - M + 1;
            if (m & kTop) t.dominos.push_back({px, py + 1, Orientation::Horizontal});
            if (m & kBottom) t.dominos.push_back({px, py, Orientation::Horizontal});
            if (m & kLeft) t.dominos.push_back({px, py, Orientation::Vertical});
            if (m & kRight) t.dominos.push_back({px + 1, py, Orientation::Vertical});
        }
    t.canonicalize();
    return t;
}

void check_weights(const std::vector<double>& w) {
    for (double x : w)
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("sampler: weights must be positive and finite");
}

}  // namespace

FaceWeights one_periodic_faces(const std::vector<double>& weights) {
    check_weights(weights);
    FaceWeights f;
    f.M = static_cast<int>(weights.size());
    const std::size_t sz = static_cast<std::size_t>(f.M) * f.M;
    f.top.assign(sz, 1.0);
    f.bottom.assign(sz, 1.0);
    f.right.assign(sz, 1.0);
    f.left.assign(sz, 1.0);
    for (int a = 0; a < f.M; ++a)
        for (int b = 0; b < f.M; ++b) f.at(f.left, a, b) = weights[f.M - a - 1];
    return f;
}

CreationTable reduce_weights(const FaceWeights& w) {
    for (const auto* v : {&w.top, &w.bottom, &w.left, &w.right}) check_weights(*v);
    CreationTable t;
    t.M = w.M;
    t.periodic = false;
    t.p = reduce_faces<double>(w.M, w.top, w.bottom, w.left, w.right, true);
    return t;
}

CreationTable reduce_weights_periodic(const std::vector<double>& weights) {
    check_weights(weights);
    const int M = static_cast<int>(weights.size());
    CreationTable t;
    t.M = M;
    t.periodic = true;
    t.p.resize(M + 1);
    std::vector<double> T(M, 1.0), B(M, 1.0), R(M, 1.0), L(M);
    for (int a = 0; a < M; ++a) L[a] = weights[M - a - 1];
    for (int n = M; n >= 1; --n) {
        std::vector<double> delta(n);
        t.p[n].resize(n);
        for (int a = 0; a < n; ++a) {
            delta[a] = T[a] * B[a] + L[a] * R[a];
            t.p[n][a] = T[a] * B[a] / delta[a];
        }
        if (n == 1) break;
        std::vector<double> T2(n - 1), B2(n - 1), L2(n - 1), R2(n - 1);
        double big = 0.0;
        for (int a = 0; a < n - 1; ++a) {
            T2[a] = T[a + 1] / delta[a + 1];
            B2[a] = B[a] / delta[a];
            R2[a] = R[a + 1] / delta[a + 1];
            L2[a] = L[a] / delta[a];
            big = std::max({big, T2[a], B2[a], R2[a], L2[a]});
        }
        for (auto* v : {&T2, &B2, &L2, &R2})
            for (double& x : *v) x /= big;
        T = std::move(T2), B = std::move(B2), L = std::move(L2), R = std::move(R2);
    }
    return t;
}

std::vector<std::vector<Rational>> reduce_weights_exact(const std::vector<Rational>& weights) {
    const int M = static_cast<int>(weights.size());
    const std::size_t sz = static_cast<std::size_t>(M) * M;
    std::vector<Rational> T(sz, 1), B(sz, 1), R(sz, 1), L(sz);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) L[static_cast<std::size_t>(a) * M + b] = weights[M - a - 1];
    auto prob = reduce_faces<Rational>(M, T, B, L, R, false);
    for (auto& level : prob)
        for (auto& q : level) q.canonicalize();
    return prob;
}

std::map<Tiling, Rational> shuffle_output_law(const std::vector<Rational>& weights) {
    const int M = static_cast<int>(weights.size());
    if (M < 1 || M > 4) throw std::invalid_argument("shuffle_output_law: M must be in [1,4]");
    const auto prob = reduce_weights_exact(weights);
    const int stride = grid_stride(M);
    std::map<std::vector<std::uint8_t>, Rational> states;
    states[std::vector<std::uint8_t>(static_cast<std::size_t>(M + 3) * stride, 0)] = 1;
    Holes holes;
    for (int n = 1; n <= M; ++n) {
        std::map<std::vector<std::uint8_t>, Rational> next;
        for (const auto& [old, pr] : states) {
            std::vector<std::uint8_t> cur(old.size(), 0);
            advance(old, cur, n, stride, holes);
            const auto& empties = holes.list;
            const std::size_t k = empties.size();
            for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
                auto filled = cur;
                Rational q = pr;
                for (std::size_t e = 0; e < k; ++e) {
                    const int a = empties[e] / stride - 1, b = empties[e] % stride - 1;
                    const Rational& pt = prob[n][static_cast<std::size_t>(a) * n + b];
                    if (bits >> e & 1) {
                        filled[empties[e]] = kTop | kBottom;
                        q *= pt;
                    } else {
                        filled[empties[e]] = kLeft | kRight;
                        q *= 1 - pt;
                    }
                }
                next[filled] += q;
            }
        }
        states = std::move(next);
    }
    std::map<Tiling, Rational> law;
    for (const auto& [masks, pr] : states) {
        auto& slot = law[masks_to_tiling(masks, M)];
        slot += pr;
        slot.canonicalize();
    }
    return law;
}

namespace {

std::vector<std::uint8_t> shuffle_masks(const CreationTable& table, SplitMix64& rng) {
    const int M = table.M, stride = grid_stride(M);
    std::vector<std::uint8_t> old(static_cast<std::size_t>(M + 3) * stride, 0), cur(old.size(), 0);
    Holes holes;
    for (int n = 1; n <= M; ++n) {
        advance(old, cur, n, stride, holes);
        for (int e : holes.list) {
            const int a = e / stride - 1, b = e % stride - 1;
            cur[e] = rng.uniform() < table.at(n, a, b) ? (kTop | kBottom) : (kLeft | kRight);
        }
        std::swap(old, cur);
    }
    return old;
}

}  // namespace

Tiling shuffle_sample(const CreationTable& table, SplitMix64& rng) {
    return masks_to_tiling(shuffle_masks(table, rng), table.M);
}

std::vector<Signature> shuffle_sample_levels(const CreationTable& table, SplitMix64& rng,
                                             const std::vector<int>& levels) {
    const int M = table.M, stride = grid_stride(M);
    for (int t : levels)
        if (t < 0 || t > M) throw std::invalid_argument("shuffle_sample_levels: level out of range");
    const auto masks = shuffle_masks(table, rng);
    // a particle of λ^(t) is the anchor cell of a domino lying in column u = M-2t
    std::vector<std::vector<char>> occupied(levels.size(), std::vector<char>(M, 0));
    auto mark = [&](int x, int y) {
        const int u = x + y - 1, v = y - x;
        if ((M - u) % 2 != 0) return;
        const int t = (M - u) / 2;
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i] == t) occupied[i][(v + M - 1) / 2] = 1;
    };
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            const std::uint8_t m = masks[cell(a, b, stride)];
            if (!m) continue;
            const int px = a - b, py = a + b - M + 1;
            if (m & kTop) mark(px, py + 1);
            if (m & kBottom) mark(px, py);
            if (m & kLeft) mark(px, py);
            if (m & kRight) mark(px + 1, py);
        }
    std::vector<Signature> out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int t = levels[i];
        Signature lam;
        lam.reserve(t);
        for (int k = M - 1; k >= 0; --k)
            if (occupied[i][k]) lam.push_back(k - (t - 1 - static_cast<int>(lam.size())));
        if (static_cast<int>(lam.size()) != t) throw std::logic_error("shuffle_sample_levels: particle count mismatch");
        out.push_back(std::move(lam));
    }
    return out;
}

Tiling shuffle_sample(const std::vector<double>& weights, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return shuffle_sample(reduce_weights_periodic(weights), rng);
}

namespace {

template <class Weight>
std::size_t pick(const std::vector<Weight>& w, double u) {
    double total = 0.0;
    for (double x : w) total += x;
    double acc = 0.0, target = u * total;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += w[i];
        if (target < acc) return i;
    }
    return w.size() - 1;
}

}  // namespace

SignatureSequence chain_sample(const std::vector<double>& betas, std::uint64_t seed) {
    const int M = static_cast<int>(betas.size());
    if (M > kChainMaxM)
        throw std::invalid_argument("chain_sample: M > " + std::to_string(kChainMaxM) +
                                    " is not supported; use shuffle_sample for large diamonds");
    for (double b : betas)
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("chain_sample: betas must lie in (0,1)");
    SplitMix64 rng(seed);
    SignatureSequence seq;
    seq.M = M;
    seq.lambdas.assign(M + 1, {});
    seq.upsilons.assign(M + 1, {});
    seq.lambdas[M] = Signature(M, 0);
    std::vector<double> w;
    for (int t = M; t >= 1; --t) {
        const auto ups = vertical_successors(seq.lambdas[t]);
        w.clear();
        for (const auto& u : ups) w.push_back(kappa_coefficient(seq.lambdas[t], u, betas[t - 1]));
        seq.upsilons[t] = ups[pick(w, rng.uniform())];

        double count = 1.0;
        for (int i = 0; i + 1 < t; ++i) count *= seq.upsilons[t][i] - seq.upsilons[t][i + 1] + 1;
        if (count > 4e6) throw std::runtime_error("chain_sample: too many interlacing candidates");
        const auto lams = interlacing_predecessors(seq.upsilons[t]);
        w.clear();
        for (const auto& l : lams) w.push_back(pr_coefficient_double(seq.upsilons[t], l));
        seq.lambdas[t - 1] = t == 1 ? Signature{} : lams[pick(w, rng.uniform())];
    }
    return seq;
}

std::vector<Signature> sample_level(const RegimeSpec& regime, int M, int level, LevelMode mode, int count,
                                    std::uint64_t master_seed, std::uint64_t run) {
    if (level < 1 || level > M) throw std::invalid_argument("sample_level: need 1 <= level <= M");
    std::vector<Signature> out;
    out.reserve(count);
    CreationTable quenched;
    if (mode == LevelMode::Quenched)
        quenched = reduce_weights_periodic(sample_environment(regime, M, mix_seed(master_seed, run, ~0ULL)).weights);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = mix_seed(master_seed, run, static_cast<std::uint64_t>(i));
        SplitMix64 rng(seed);
        auto lams = mode == LevelMode::Quenched
                        ? shuffle_sample_levels(quenched, rng, {level})
                        : shuffle_sample_levels(
                              reduce_weights_periodic(sample_environment(regime, M, seed).weights), rng, {level});
        out.push_back(std::move(lams[0]));
    }
    return out;
}

}  // namespace aztec
