#pragma once

// Brute-force oracles. Everything here is exact enumeration (or refused);
// none of it goes through the closed forms it is used to check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adn/adn_model.hpp"
#include "adn/graph_core.hpp"

namespace adn {

inline constexpr double kMaxEnumerationBranches = 1e7;

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(const SymMatrix& m);

// Number of branches enumerate_expected_exp would visit.
double enumeration_size(const ModelParams& p, ModelKind model);

struct EnumerationResult {
    SymMatrix expectation;
    double total_probability = 0.0; // sum of branch probabilities
    std::uint64_t branches = 0;     // branches with non-zero probability
};

// E[e^{-T L}] over every snapshot of the given model, each weighted by its
// probability. T defaults to 2 dt. Throws EnumerationTooLarge above
// kMaxEnumerationBranches.
EnumerationResult enumerate_expected_exp(const ModelParams& p, ModelKind model, const TieBreakRule& rule);
EnumerationResult enumerate_expected_exp_at(const ModelParams& p, ModelKind model, const TieBreakRule& rule,
                                            double T);

// E[e^{-T L_{i,N}} | i activated] as the plain average over all m-subsets.
SymMatrix enumerate_conditional_exp(const ModelParams& p, NodeId i, double T);

struct InequalityRow {
    double T = 0.0;
    double lambda_full = 0.0;       // lambda_{n-1}(E[e^{-T L}])
    double lambda_fastswitch = 0.0; // lambda_{n-1}(E[e^{-T L''}])
    double gap = 0.0;               // lambda_fastswitch - lambda_full
    bool holds = true;
};

struct InequalityReport {
    std::vector<InequalityRow> rows;
    std::optional<double> first_failure; // smallest T at which the inequality fails
};

// Floating-point floor below which a negative gap still counts as holding.
inline constexpr double kInequalityFloor = -1e-9;

InequalityReport verify_fast_switch_inequality(const ModelParams& p, const TieBreakRule& rule,
                                               const std::vector<double>& T_grid);

// ---------------------------------------------------------------------------
// Suite run by `adn validate`.

enum class CheckStatus { pass, fail, refused };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    double max_error = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationOptions {
    // Test hook: added to one entry of every closed-form M_i before comparison.
    double mi_perturbation = 0.0;
    // Extra checks for a user configuration (skipped with "refused" when the
    // enumeration is too large).
    std::optional<ModelParams> params;
    TieBreakRule rule = TieBreakRule::uniform();
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::vector<InequalityRow> inequality_rows;
    bool passed() const;
};

ValidationReport run_validation_suite(const ValidationOptions& opts);

} // namespace adn
