#pragma once

#include <string>
#include <vector>

#include "combinatorics.hpp"
#include "environment.hpp"

namespace aztec {

// "3", "1/2", "0.25" or "-1.5e-3" as an exact rational
Rational parse_rational(const std::string& s);

// Every tiling of the size-M diamond checked against the exact Boltzmann
// measure: validity, bijection, height and binary roundtrips, the sequence
// probability, and the exact law of the shuffling output.
struct EnumerationReport {
    int M = 0;
    std::vector<Rational> weights;
    long long tilings = 0;
    long long verified = 0;
    bool count_ok = false;           // 2^(M(M+1)/2)
    bool partition_ok = false;       // enumeration sum equals the product formula
    bool shuffle_law_ok = false;     // shuffling output law equals the Boltzmann law
    std::vector<std::string> failures;

    bool ok() const { return count_ok && partition_ok && shuffle_law_ok && verified == tilings; }
};
EnumerationReport verify_enumeration(int M, const std::vector<Rational>& weights);
// W = (2, 1/2, 3, 1, ...) truncated to M
std::vector<Rational> default_enumeration_weights(int M);

// point mass 1/2, W uniform on {1/2, 5}, W uniform on [0,2], b = 1/2 ± 1/5
struct NamedDistribution {
    std::string name;
    WeightDistribution dist;
};
std::vector<NamedDistribution> test_environments();

struct CheckLine {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

// Lemma property tests plus the agreement of independently derived formulas.
struct SelfCheckReport {
    std::vector<CheckLine> lines;
    bool ok() const;
};
SelfCheckReport selfcheck(std::uint64_t seed = 20240601);

}  // namespace aztec
