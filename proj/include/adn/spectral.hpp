#pragma once

#include <vector>

#include "adn/adn_model.hpp"
#include "adn/graph_core.hpp"

namespace adn {

// Second-largest eigenvalue (with multiplicity) of a symmetric matrix, n >= 2.
//
// When the all-ones vector is an eigenvector (every matrix this library feeds
// in), its eigenvalue is paired with the spectrum of M restricted to the
// orthogonal complement, so lambda_{n-1} is read off without ordering
// ambiguity near 1. Otherwise the full spectrum is sorted.
double lambda_second_largest(const SymMatrix& m);

// Spectrum of M on the complement of the all-ones vector, ascending.
std::vector<double> off_consensus_spectrum(const SymMatrix& m);

// eps^-1 * |Pi z0|^2 * lambda^K.
double convergence_bound(double pz0_sq, double eps, double lambda, unsigned long long K);

enum class BoundKind { sparse, fastswitch };

struct DecayBound {
    double rate = 1.0;      // 1 - sum_w + lambda
    BoundKind kind = BoundKind::sparse;
    double lambda = 0.0;    // lambda_{n-1}(sum_i w_i M_i)
    double sum_w = 0.0;
    std::vector<double> weights;
};

// Decay rate bound for arbitrary weights w (w = a or w = b).
DecayBound weighted_decay_bound(const ModelParams& p, const std::vector<double>& w, BoundKind kind);

DecayBound gamma_sp(const ModelParams& p);

// Survivor probabilities b_i of the fast-switching model. Uniform rules use
// the Poisson-binomial recursion; table rules enumerate all 2^n activated
// sets (n <= 20).
std::vector<double> compute_b(const ModelParams& p, const TieBreakRule& rule);

// 2^n enumeration of b for any rule (n <= 20).
std::vector<double> compute_b_enumerated(const ModelParams& p, const TieBreakRule& rule);

// PMF of the number of successes among independent Bernoulli(probs[j]).
std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs);

DecayBound gamma_fs(const ModelParams& p, const TieBreakRule& rule);

} // namespace adn
