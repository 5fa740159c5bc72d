#pragma once

// Closed-form exponentials of star Laplacians and the expected one-step
// transition matrices they induce.

#include <span>
#include <vector>

#include "adn/adn_model.hpp"
#include "adn/graph_core.hpp"

namespace adn {

// Entries of e^{-t L} for a star with m leaves.
struct StarExpEntries {
    double center_diag;   // (m e^{-(m+1)t} + 1) / (m+1)
    double spoke;         // (1 - e^{-(m+1)t}) / (m+1), center <-> leaf
    double leaf_pair;     // (m + e^{-(m+1)t} - (m+1) e^{-t}) / (m(m+1)), leaf <-> leaf
    double leaf_diag;     // e^{-t} + leaf_pair
};

StarExpEntries star_exp_entries(std::size_t m, double t);

// e^{-t L_{i,N}}.
SymMatrix star_exponential(const StarSpec& spec, double t);

// In-place z <- e^{-t L_{i,N}} z, touching only the m+1 star coordinates.
void apply_star_exponential(const StarSpec& spec, const StarExpEntries& e, std::span<double> z);

// M_i = E[e^{-2 dt L_{i,N}} | node i activated], N a uniform m-subset of V\{i}.
SymMatrix build_Mi(const ModelParams& p, NodeId i);

// (1 - sum w) I + sum_i w_i M_i. Requires w_i >= 0 and sum w <= 1.
SymMatrix expected_exp_weighted(const ModelParams& p, std::span<const double> w);

// E[e^{-2 dt L'}] for the sparse model: expected_exp_weighted with w = a.
SymMatrix expected_exp_sparse(const ModelParams& p);

} // namespace adn
