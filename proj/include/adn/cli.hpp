#pragma once

// Experiment configuration and the subcommands behind the `adn` tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "adn/adn_model.hpp"
#include "adn/mc_sim.hpp"
#include "adn/spectral.hpp"

namespace adn::cli {

enum ExitCode : int { kSuccess = 0, kValidationBreach = 1, kConfigError = 2 };

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ActivitySpec {
    enum class Mode { explicit_values, uniform_draw } mode = Mode::explicit_values;
    std::vector<double> values; // explicit_values
    double upper = 0.0;         // uniform_draw: a_i ~ U(0, upper]
};

struct ExperimentConfig {
    std::size_t n = 0;
    std::size_t m = 0;
    double dt = 0.0;
    std::optional<double> eps;
    std::size_t k_max = 100;
    std::uint64_t n_paths = 10000;
    std::uint64_t seed = 0;
    ModelKind model = ModelKind::sparse;
    ActivitySpec activity;
    TieBreakRule tie_break = TieBreakRule::uniform();
    std::optional<std::vector<double>> z0; // default: U[-1, 1]^n from the run seed
    std::optional<FitWindow> fit_window;
    std::string notes;
};

// Throws ConfigError naming the offending field path (e.g. "activity.upper").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Concrete run inputs after drawing any random activity rates and z0.
struct ResolvedRun {
    ModelParams params;
    StateVector z0;
};

// Activity rates and z0 come from a setup stream derived from the seed,
// separate from the per-path streams.
ResolvedRun resolve(const ExperimentConfig& cfg);

// Locale-independent decimal with 17 significant digits.
std::string format_double(double v);

std::string survival_csv(const SurvivalCurve& curve);

nlohmann::json tie_break_to_json(const TieBreakRule& rule);

// Threads from --threads, else ADN_THREADS, else hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> flag);

int cmd_gamma(BoundKind kind, const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out);
int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned threads,
                 std::ostream& out);

struct ValidateOptions {
    std::optional<ExperimentConfig> config;
    double mi_perturbation = 0.0;
};

int cmd_validate(const ValidateOptions& opts, const std::filesystem::path& out_dir, std::ostream& out);
int cmd_count_snapshots(std::size_t n, std::size_t m, std::ostream& out);

} // namespace adn::cli
