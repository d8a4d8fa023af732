#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "aztec.hpp"
#include "combinatorics.hpp"
#include "environment.hpp"
#include "rng.hpp"

namespace aztec {

// Edge weights of the size-M diamond indexed by face. Faces of the size-n
// diamond are the 2x2 blocks centred at lattice points p with |p|_1 <= n-1 and
// p_x+p_y+n odd, indexed by a = (p_x+p_y+n-1)/2, b = (p_y-p_x+n-1)/2 in
// [0,n). Each face owns four possible dominos: top (N), bottom (S), left (W),
// right (E).
struct FaceWeights {
    int M = 0;
    std::vector<double> top, bottom, left, right;  // index a*M + b

    double& at(std::vector<double>& v, int a, int b) { return v[static_cast<std::size_t>(a) * M + b]; }
};

// W_t sits on the left (W-type) domino of faces with a = M - t.
FaceWeights one_periodic_faces(const std::vector<double>& weights);

// Probability of creating a top/bottom pair in each empty face, per level.
struct CreationTable {
    int M = 0;
    bool periodic = false;               // tables depend on a only
    std::vector<std::vector<double>> p;  // p[n] has n entries (periodic) or n*n (a*n + b)

    double at(int n, int a, int b) const {
        return periodic ? p[n][a] : p[n][static_cast<std::size_t>(a) * n + b];
    }
};

CreationTable reduce_weights(const FaceWeights& w);
CreationTable reduce_weights_periodic(const std::vector<double>& weights);

// Exact law of the shuffling output for rational one-periodic weights, by
// enumerating every creation coin (M <= 4).
std::map<Tiling, Rational> shuffle_output_law(const std::vector<Rational>& weights);
// Creation probabilities as exact rationals for the same input.
std::vector<std::vector<Rational>> reduce_weights_exact(const std::vector<Rational>& weights);

Tiling shuffle_sample(const CreationTable& table, SplitMix64& rng);
Tiling shuffle_sample(const std::vector<double>& weights, std::uint64_t seed);
// Same draw as shuffle_sample, reduced to λ^(t) for the requested levels.
std::vector<Signature> shuffle_sample_levels(const CreationTable& table, SplitMix64& rng,
                                             const std::vector<int>& levels);

// Markov chain through the signature sequence, transition by transition.
SignatureSequence chain_sample(const std::vector<double>& betas, std::uint64_t seed);
constexpr int kChainMaxM = 12;

enum class LevelMode { Quenched, Annealed };

// λ^(level) of `count` samples; sample i uses seed mix_seed(master, run, i).
std::vector<Signature> sample_level(const RegimeSpec& regime, int M, int level, LevelMode mode, int count,
                                    std::uint64_t master_seed, std::uint64_t run = 0);

}  // namespace aztec
