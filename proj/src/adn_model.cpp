#include "adn/adn_model.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "adn/errors.hpp"

namespace adn {

void ModelParams::validate() const {
    if (n < 2) {
        throw ParameterError("n must be at least 2");
    }
    if (m < 1 || m > n - 1) {
        throw ParameterError("m must satisfy 1 <= m <= n-1 (got m=" + std::to_string(m) +
                             ", n=" + std::to_string(n) + ")");
    }
    if (activity.size() != n) {
        throw ParameterError("activity vector must have length n");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(activity[i] > 0.0 && activity[i] <= 1.0)) {
            throw ParameterError("activity rate a_" + std::to_string(i + 1) + " must lie in (0, 1]");
        }
    }
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw ParameterError("dt must be finite and non-negative");
    }
}

void ModelParams::validate_sparse() const {
    validate();
    const double sum = activity_sum();
    if (sum > 1.0) {
        throw ParameterError("sparse model requires sum of activity rates <= 1 (got " +
                             std::to_string(sum) + ")");
    }
}

double ModelParams::activity_sum() const { return std::accumulate(activity.begin(), activity.end(), 0.0); }

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::full:
        return "full";
    case ModelKind::sparse:
        return "sparse";
    case ModelKind::fastswitch:
        return "fastswitch";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "full") {
        return ModelKind::full;
    }
    if (name == "sparse") {
        return ModelKind::sparse;
    }
    if (name == "fastswitch") {
        return ModelKind::fastswitch;
    }
    throw ParameterError("unknown model '" + std::string(name) + "' (expected full, sparse or fastswitch)");
}

TieBreakRule TieBreakRule::table(std::map<NodeSet, std::vector<double>> weights) {
    for (const auto& [set, w] : weights) {
        const auto members = static_cast<std::size_t>(std::popcount(set));
        if (members < 2) {
            throw ParameterError("tie-break table: sets need at least two members");
        }
        if (w.size() != members) {
            throw ParameterError("tie-break table: weight count does not match set size");
        }
        double sum = 0.0;
        for (double b : w) {
            if (!(b >= 0.0)) {
                throw ParameterError("tie-break table: weights must be non-negative");
            }
            sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw ParameterError("tie-break table: weights of a set must sum to 1");
        }
    }
    TieBreakRule rule;
    rule.uniform_ = false;
    rule.table_ = std::move(weights);
    return rule;
}

std::vector<double> TieBreakRule::weights_for(NodeSet s) const {
    const auto members = static_cast<std::size_t>(std::popcount(s));
    if (uniform_ || members == 1) {
        return std::vector<double>(members, 1.0 / static_cast<double>(members));
    }
    auto it = table_.find(s);
    if (it == table_.end()) {
        throw ParameterError("tie-break table has no entry for activated set mask " + std::to_string(s));
    }
    return it->second;
}

std::vector<NodeId> all_nodes_except(std::size_t n, NodeId excluded) {
    std::vector<NodeId> out;
    out.reserve(n - 1);
    for (NodeId j = 0; j < n; ++j) {
        if (j != excluded) {
            out.push_back(j);
        }
    }
    return out;
}

StarSpec sample_star(std::size_t n, std::size_t m, NodeId center, Rng& rng) {
    std::vector<NodeId> pool = all_nodes_except(n, center);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return StarSpec(n, center, std::move(pool));
}

Snapshot generate_snapshot(const ModelParams& p, Rng& rng) {
    Snapshot s{p.n, {}, ModelKind::full};
    // Activation flags first, then neighbor choices, so the activated set
    // consumes a fixed number of draws.
    std::vector<NodeId> active;
    for (NodeId i = 0; i < p.n; ++i) {
        if (rng.bernoulli(p.activity[i])) {
            active.push_back(i);
        }
    }
    for (NodeId i : active) {
        s.events.push_back(sample_star(p.n, p.m, i, rng));
    }
    return s;
}

Snapshot generate_sparse_snapshot(const ModelParams& p, Rng& rng) {
    if (p.activity_sum() > 1.0) {
        throw ParameterError("sparse model requires sum of activity rates <= 1");
    }
    Snapshot s{p.n, {}, ModelKind::sparse};
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (NodeId i = 0; i < p.n; ++i) {
        cumulative += p.activity[i];
        if (u < cumulative) {
            s.events.push_back(sample_star(p.n, p.m, i, rng));
            break;
        }
    }
    return s;
}

Snapshot generate_fastswitch_snapshot(const ModelParams& p, const TieBreakRule& rule, Rng& rng) {
    if (!rule.is_uniform() && p.n > kMaxTableNodes) {
        throw ParameterError("tie-break table mode supports at most 20 nodes");
    }
    Snapshot s{p.n, {}, ModelKind::fastswitch};
    std::vector<NodeId> active;
    for (NodeId i = 0; i < p.n; ++i) {
        if (rng.bernoulli(p.activity[i])) {
            active.push_back(i);
        }
    }
    if (active.empty()) {
        return s;
    }
    NodeId survivor = active.front();
    if (active.size() >= 2) {
        if (rule.is_uniform()) {
            survivor = active[rng.below(active.size())];
        } else {
            NodeSet set = 0;
            for (NodeId i : active) {
                set |= NodeSet{1} << i;
            }
            const std::vector<double> w = rule.weights_for(set);
            const double u = rng.uniform01();
            double cumulative = 0.0;
            survivor = active.back();
            for (std::size_t k = 0; k < active.size(); ++k) {
                cumulative += w[k];
                if (u < cumulative) {
                    survivor = active[k];
                    break;
                }
            }
        }
    }
    s.events.push_back(sample_star(p.n, p.m, survivor, rng));
    return s;
}

Snapshot generate(ModelKind kind, const ModelParams& p, const TieBreakRule& rule, Rng& rng) {
    switch (kind) {
    case ModelKind::full:
        return generate_snapshot(p, rng);
    case ModelKind::sparse:
        return generate_sparse_snapshot(p, rng);
    case ModelKind::fastswitch:
        return generate_fastswitch_snapshot(p, rule, rng);
    }
    throw ParameterError("unknown model kind");
}

SymMatrix laplacian_of(const Snapshot& s) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const StarSpec& e : s.events) {
        for (NodeId j : e.neighbors()) {
            edges.emplace_back(e.center(), j);
        }
    }
    return laplacian_from_edges(s.n, edges);
}

boost::multiprecision::cpp_int snapshot_count(std::size_t n, std::size_t m) {
    if (m < 1 || n < 2 || m > n - 1) {
        throw ParameterError("snapshot_count: need 1 <= m <= n-1");
    }
    boost::multiprecision::cpp_int choose = 1;
    for (std::size_t i = 0; i < m; ++i) {
        choose = choose * (n - 1 - i) / (i + 1);
    }
    return boost::multiprecision::pow(choose + 1, static_cast<unsigned>(n));
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double out = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return std::round(out);
}

} // namespace adn
