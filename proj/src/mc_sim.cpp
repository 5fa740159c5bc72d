#include "adn/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "adn/closed_form.hpp"
#include "adn/errors.hpp"

namespace adn {

StateVector project_off_consensus(std::span<const double> z) {
    StateVector out(z.begin(), z.end());
    if (out.empty()) {
        return out;
    }
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
    for (double& v : out) {
        v -= mean;
    }
    return out;
}

double off_consensus_norm_sq(std::span<const double> z) {
    if (z.empty()) {
        return 0.0;
    }
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double acc = 0.0;
    for (double v : z) {
        acc += (v - mean) * (v - mean);
    }
    return acc;
}

void step_in_place(std::span<double> z, const Snapshot& s, double dt) {
    if (z.size() != s.n) {
        throw ParameterError("step: state dimension does not match snapshot");
    }
    if (s.events.empty()) {
        return;
    }
    if (s.events.size() == 1) {
        const StarSpec& star = s.events.front();
        apply_star_exponential(star, star_exp_entries(star.m(), dt), z);
        return;
    }
    const SymMatrix transition = expm_sym(laplacian_of(s), dt);
    const Eigen::Map<Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd next = transition.dense() * zv;
    std::copy(next.data(), next.data() + next.size(), z.begin());
}

StateVector step(std::span<const double> z, const Snapshot& s, double dt) {
    StateVector out(z.begin(), z.end());
    step_in_place(out, s, dt);
    return out;
}

namespace {

void simulate_range(const ModelParams& p, ModelKind model, const TieBreakRule& rule,
                    std::span<const double> z0, const SimulationOptions& opts, std::uint64_t first,
                    std::uint64_t stride, std::vector<std::uint64_t>& counts) {
    const std::size_t k_max = opts.k_max;
    std::vector<double> norms(k_max + 1);
    StateVector z(z0.size());
    // Cached for the sparse and fast-switching models, whose stars always
    // have m leaves.
    const StarExpEntries star_entries = star_exp_entries(p.m, p.dt);

    for (std::uint64_t path = first; path < opts.n_paths; path += stride) {
        Rng rng = Rng::for_path(opts.seed, path);
        std::copy(z0.begin(), z0.end(), z.begin());
        norms[0] = off_consensus_norm_sq(z);
        for (std::size_t k = 1; k <= k_max; ++k) {
            const Snapshot snap = generate(model, p, rule, rng);
            if (snap.events.empty()) {
                norms[k] = norms[k - 1];
                continue;
            }
            if (snap.events.size() == 1) {
                apply_star_exponential(snap.events.front(), star_entries, z);
            } else {
                step_in_place(z, snap, p.dt);
            }
            norms[k] = off_consensus_norm_sq(z);
        }
        double suffix_max = 0.0;
        for (std::size_t k = k_max + 1; k-- > 0;) {
            suffix_max = std::max(suffix_max, norms[k]);
            if (suffix_max >= opts.eps) {
                // Every earlier K also sees this suffix maximum.
                for (std::size_t j = 0; j <= k; ++j) {
                    ++counts[j];
                }
                break;
            }
        }
    }
}

} // namespace

SurvivalCurve run_paths(const ModelParams& p, ModelKind model, const TieBreakRule& rule,
                        std::span<const double> z0, const SimulationOptions& opts) {
    if (model == ModelKind::sparse) {
        p.validate_sparse();
    } else {
        p.validate();
    }
    if (!(p.dt > 0.0)) {
        throw ParameterError("run_paths: dt must be positive");
    }
    if (opts.k_max < 1) {
        throw ParameterError("run_paths: k_max must be at least 1");
    }
    if (opts.n_paths < 1) {
        throw ParameterError("run_paths: n_paths must be at least 1");
    }
    if (!(opts.eps > 0.0)) {
        throw ParameterError("run_paths: eps must be positive");
    }
    if (z0.size() != p.n) {
        throw ParameterError("run_paths: z0 must have length n");
    }
    if (!std::all_of(z0.begin(), z0.end(), [](double v) { return std::isfinite(v); })) {
        throw ParameterError("run_paths: z0 has non-finite entries");
    }
    if (model == ModelKind::fastswitch && !rule.is_uniform() && p.n > kMaxTableNodes) {
        throw ParameterError("run_paths: tie-break table mode supports at most 20 nodes");
    }

    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(opts.threads == 0 ? 1 : opts.threads, 1, opts.n_paths));
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(opts.k_max + 1, 0));
    if (workers == 1) {
        simulate_range(p, model, rule, z0, opts, 0, 1, partial[0]);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    simulate_range(p, model, rule, z0, opts, w, workers, partial[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    SurvivalCurve curve;
    curve.eps = opts.eps;
    curve.paths = opts.n_paths;
    curve.counts.assign(opts.k_max + 1, 0);
    for (const auto& part : partial) {
        for (std::size_t k = 0; k <= opts.k_max; ++k) {
            curve.counts[k] += part[k];
        }
    }
    curve.probs.resize(curve.counts.size());
    for (std::size_t k = 0; k < curve.counts.size(); ++k) {
        curve.probs[k] = static_cast<double>(curve.counts[k]) / static_cast<double>(curve.paths);
    }
    return curve;
}

FitWindow default_fit_window(std::uint64_t paths) {
    return {10.0 / static_cast<double>(paths), 0.95};
}

DecayFit fit_decay_rate(const SurvivalCurve& curve, FitWindow window) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < curve.probs.size(); ++k) {
        const double q = curve.probs[k];
        if (q > window.lo && q < window.hi) {
            xs.push_back(static_cast<double>(k));
            ys.push_back(std::log(q));
        }
    }
    if (xs.size() < 5) {
        std::ostringstream msg;
        msg << "fit_decay_rate: only " << xs.size() << " points inside the window (" << window.lo
            << ", " << window.hi << "); need at least 5";
        throw ParameterError(msg.str());
    }
    const double count = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    DecayFit fit;
    const double slope = sxy / sxx;
    fit.rate = std::exp(slope);
    // A flat curve is fitted exactly by a zero slope.
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = xs.size();
    fit.first_k = static_cast<std::size_t>(xs.front());
    fit.last_k = static_cast<std::size_t>(xs.back());
    return fit;
}

DecayFit fit_decay_rate(const SurvivalCurve& curve) {
    return fit_decay_rate(curve, default_fit_window(curve.paths));
}

} // namespace adn
