#pragma once

// Activity driven temporal networks: the full model, the sparse
// (at-most-one-activation) variant and the fast-switching (single survivor)
// variant.

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "adn/graph_core.hpp"
#include "adn/rng.hpp"

namespace adn {

struct ModelParams {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<double> activity; // a_i in (0, 1], length n
    double dt = 0.0;              // sampling period

    // Throws ParameterError naming the violated constraint.
    void validate() const;
    // validate() plus sum(a) <= 1.
    void validate_sparse() const;

    double activity_sum() const;
};

enum class ModelKind { full, sparse, fastswitch };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct Snapshot {
    std::size_t n = 0;
    std::vector<StarSpec> events;
    ModelKind kind = ModelKind::full;
};

// Bit i of a NodeSet is node i. Only used where n <= 20.
using NodeSet = std::uint32_t;
inline constexpr std::size_t kMaxTableNodes = 20;

// How the fast-switching model picks the survivor among activated nodes.
class TieBreakRule {
public:
    static TieBreakRule uniform() { return TieBreakRule(); }

    // weights[S] lists beta_{S,i} for the members of S in ascending node order.
    // Throws ParameterError if a set has fewer than 2 members, a weight is
    // negative, or the weights of a set do not sum to 1 within 1e-12.
    static TieBreakRule table(std::map<NodeSet, std::vector<double>> weights);

    bool is_uniform() const noexcept { return uniform_; }

    // beta_{S,i} for every member of S (ascending). Uniform mode returns
    // 1/|S| each; table mode throws ParameterError if S is missing.
    std::vector<double> weights_for(NodeSet s) const;

    const std::map<NodeSet, std::vector<double>>& entries() const noexcept { return table_; }

private:
    TieBreakRule() = default;

    bool uniform_ = true;
    std::map<NodeSet, std::vector<double>> table_;
};

// A uniformly random m-subset of V \ {center} (partial Fisher-Yates).
StarSpec sample_star(std::size_t n, std::size_t m, NodeId center, Rng& rng);

Snapshot generate_snapshot(const ModelParams& p, Rng& rng);
Snapshot generate_sparse_snapshot(const ModelParams& p, Rng& rng);
Snapshot generate_fastswitch_snapshot(const ModelParams& p, const TieBreakRule& rule, Rng& rng);
Snapshot generate(ModelKind kind, const ModelParams& p, const TieBreakRule& rule, Rng& rng);

// Simple-graph Laplacian of the union of the snapshot's stars.
SymMatrix laplacian_of(const Snapshot& s);

// [1 + C(n-1, m)]^n.
boost::multiprecision::cpp_int snapshot_count(std::size_t n, std::size_t m);

// C(n, k) as a double; exact while it fits in 53 bits.
double binomial(std::size_t n, std::size_t k);

// Calls f(subset) for every k-subset of `pool`, in lexicographic order.
template <typename F>
void for_each_subset(const std::vector<NodeId>& pool, std::size_t k, F&& f) {
    const std::size_t total = pool.size();
    if (k > total) {
        return;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    std::vector<NodeId> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) {
            subset[i] = pool[idx[i]];
        }
        f(subset);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == total - k + (i - 1)) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

std::vector<NodeId> all_nodes_except(std::size_t n, NodeId excluded);

} // namespace adn
