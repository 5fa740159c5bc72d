#pragma once

// Sampled consensus dynamics z_{k+1} = e^{-dt L_k} z_k and Monte Carlo
// estimation of P(sup_{k>=K} |Pi z_k|^2 >= eps).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adn/adn_model.hpp"

namespace adn {

using StateVector = std::vector<double>;

// z - mean(z) * 1.
StateVector project_off_consensus(std::span<const double> z);

// |Pi z|^2.
double off_consensus_norm_sq(std::span<const double> z);

// e^{-dt L(s)} z. Snapshots with at most one star use the closed-form action
// on the star's coordinates; larger ones exponentiate the union Laplacian.
StateVector step(std::span<const double> z, const Snapshot& s, double dt);
void step_in_place(std::span<double> z, const Snapshot& s, double dt);

struct SurvivalCurve {
    double eps = 0.0;
    std::uint64_t paths = 0;
    // counts[K] = number of paths with max_{k>=K} |Pi z_k|^2 >= eps.
    std::vector<std::uint64_t> counts;
    std::vector<double> probs;
    std::optional<double> fitted_rate;
};

struct SimulationOptions {
    std::size_t k_max = 100;
    std::uint64_t n_paths = 10000;
    double eps = 0.1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// Path p draws from Rng::for_path(seed, p); counts are summed as integers, so
// the result does not depend on `threads`.
SurvivalCurve run_paths(const ModelParams& p, ModelKind model, const TieBreakRule& rule,
                        std::span<const double> z0, const SimulationOptions& opts);

struct FitWindow {
    double lo;
    double hi;
};

// Default window (10 / paths, 0.95): drops the saturated head and the
// low-count tail.
FitWindow default_fit_window(std::uint64_t paths);

struct DecayFit {
    double rate = 1.0;      // exp(slope of log prob vs K)
    double r_squared = 1.0; // of the log-linear fit
    std::size_t points = 0;
    std::size_t first_k = 0;
    std::size_t last_k = 0;
};

// Least-squares fit of log probs[K] against K over lo < probs[K] < hi.
// Throws ParameterError if fewer than 5 points fall in the window.
DecayFit fit_decay_rate(const SurvivalCurve& curve, FitWindow window);
DecayFit fit_decay_rate(const SurvivalCurve& curve);

} // namespace adn
