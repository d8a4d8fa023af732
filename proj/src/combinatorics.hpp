#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace aztec {

using Rational = mpq_class;
using Signature = std::vector<int>;

enum class Interlace { Horizontal, Vertical };

// lambdas[t] = λ^(t) for t = 0..M (λ^(0) is empty), upsilons[t] = υ^(t) for
// t = 1..M (upsilons[0] is unused and empty).
struct SignatureSequence {
    int M = 0;
    std::vector<Signature> lambdas;
    std::vector<Signature> upsilons;

    bool operator==(const SignatureSequence&) const = default;
};

bool is_signature(const Signature& s);
long long signature_size(const Signature& s);
std::string to_string(const Signature& s);
std::string to_string(const SignatureSequence& seq);

// Horizontal: a ≺ b with len(a) = len(b) - 1. Vertical: b_i - a_i ∈ {0,1}.
// Throws std::invalid_argument on a length mismatch.
bool interlace_check(const Signature& a, const Signature& b, Interlace mode);

Rational schur_at_ones(const Signature& lam, int N);
double schur_at_ones_double(const Signature& lam);

// Bialternant ratio; throws std::domain_error when two points coincide.
std::complex<double> schur_eval(const Signature& lam, const std::vector<std::complex<double>>& xs);

// Dual Jacobi-Trudi determinant in elementary symmetric polynomials; valid at
// coincident points, used as an independent evaluation path.
double schur_eval_jacobi_trudi(const Signature& lam, const std::vector<double>& xs);

Rational kappa_coefficient(const Signature& lam, const Signature& ups, const Rational& beta);
double kappa_coefficient(const Signature& lam, const Signature& ups, double beta);
Rational pr_coefficient(const Signature& ups, const Signature& lam);
double pr_coefficient_double(const Signature& ups, const Signature& lam);

bool is_valid_sequence(const SignatureSequence& seq);

struct SequenceProbability {
    Rational value;
    bool valid = true;
};

// Product of transition coefficients; asserts agreement with the closed form.
SequenceProbability sequence_probability(const SignatureSequence& seq, const std::vector<Rational>& betas);
Rational sequence_probability_closed_form(const SignatureSequence& seq, const std::vector<Rational>& betas);

mpz_class moments_pk(const Signature& lam, int k);
double moments_pk_double(const Signature& lam, int k);
std::vector<double> empirical_measure(const Signature& lam);

// All υ with λ ≺_v υ, and all μ with μ ≺ υ.
std::vector<Signature> vertical_successors(const Signature& lam);
std::vector<Signature> interlacing_predecessors(const Signature& ups);

// All sequences for a given M (guarded at M ≤ 5).
std::vector<SignatureSequence> enumerate_sequences(int M);

struct EigenCheck {
    bool ok = false;
    double eigenvalue = 0.0;
    double expected = 0.0;
};

// Finite-difference check of D_k s_λ = p_k s_λ at a generic complex point.
EigenCheck dk_eigenrelation_check(const Signature& lam, int k, std::uint64_t seed = 1);

}  // namespace aztec
