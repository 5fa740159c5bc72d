// adn: decay-rate bounds and Monte Carlo runs for consensus on activity
// driven networks.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adn/cli.hpp"
#include "adn/errors.hpp"

using namespace adn::cli;

int main(int argc, char** argv) {
    CLI::App app{"Consensus on activity driven networks: decay-rate bounds, simulation, validation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "JSON experiment configuration");
        if (config_required) {
            opt->required();
        }
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "overrides the configuration seed");
        sub->add_option("--threads", threads, "worker threads (fallback: ADN_THREADS)");
    };

    auto* gamma_sp_cmd = app.add_subcommand("gamma-sp", "sparse-regime decay-rate bound");
    add_common(gamma_sp_cmd, true);
    auto* gamma_fs_cmd = app.add_subcommand("gamma-fs", "fast-switching decay-rate bound");
    add_common(gamma_fs_cmd, true);
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo survival curve");
    add_common(simulate_cmd, true);

    auto* validate_cmd = app.add_subcommand("validate", "closed forms against brute-force enumeration");
    add_common(validate_cmd, false);
    double perturb_mi = 0.0;
    validate_cmd->add_option("--perturb-mi", perturb_mi, "add this offset to an M_i entry (sensitivity check)")
        ->group("");

    auto* count_cmd = app.add_subcommand("count-snapshots", "number of possible snapshots [1 + C(n-1,m)]^n");
    add_common(count_cmd, false);
    std::optional<std::size_t> count_n;
    std::optional<std::size_t> count_m;
    count_cmd->add_option("--n", count_n, "node count");
    count_cmd->add_option("--m", count_m, "edges per activation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        std::optional<ExperimentConfig> cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            if (seed) {
                cfg->seed = *seed;
            }
        }
        if (*gamma_sp_cmd) {
            return cmd_gamma(adn::BoundKind::sparse, *cfg, out_dir, std::cout);
        }
        if (*gamma_fs_cmd) {
            return cmd_gamma(adn::BoundKind::fastswitch, *cfg, out_dir, std::cout);
        }
        if (*simulate_cmd) {
            return cmd_simulate(*cfg, out_dir, resolve_threads(threads), std::cout);
        }
        if (*validate_cmd) {
            ValidateOptions opts;
            opts.config = cfg;
            opts.mi_perturbation = perturb_mi;
            return cmd_validate(opts, out_dir, std::cout);
        }
        if (*count_cmd) {
            const std::size_t n = count_n ? *count_n : (cfg ? cfg->n : 0);
            const std::size_t m = count_m ? *count_m : (cfg ? cfg->m : 0);
            if (n == 0 || m == 0) {
                throw ConfigError("--n/--m", "give --n and --m or a --config");
            }
            return cmd_count_snapshots(n, m, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const adn::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kSuccess;
}
