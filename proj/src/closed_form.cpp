#include "adn/closed_form.hpp"

#include <cmath>
#include <numeric>

#include "adn/errors.hpp"

namespace adn {

StarExpEntries star_exp_entries(std::size_t m, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ParameterError("star exponential: t must be finite and non-negative");
    }
    const double md = static_cast<double>(m);
    // 1 - e^{-(m+1)t} and 1 - e^{-t}, without cancellation for small t.
    const double one_minus_big = -std::expm1(-(md + 1.0) * t);
    const double one_minus_small = -std::expm1(-t);
    StarExpEntries e{};
    e.spoke = one_minus_big / (md + 1.0);
    e.center_diag = 1.0 - md * e.spoke;
    // m + e^{-(m+1)t} - (m+1)e^{-t} = (m+1)(1 - e^{-t}) - (1 - e^{-(m+1)t})
    e.leaf_pair = ((md + 1.0) * one_minus_small - one_minus_big) / (md * (md + 1.0));
    e.leaf_diag = std::exp(-t) + e.leaf_pair;
    return e;
}

SymMatrix star_exponential(const StarSpec& spec, double t) {
    const StarExpEntries e = star_exp_entries(spec.m(), t);
    SymMatrix out = SymMatrix::identity(spec.n());
    const NodeId c = spec.center();
    const auto& nb = spec.neighbors();
    out.set(c, c, e.center_diag);
    for (std::size_t a = 0; a < nb.size(); ++a) {
        out.set(c, nb[a], e.spoke);
        out.set(nb[a], nb[a], e.leaf_diag);
        for (std::size_t b = a + 1; b < nb.size(); ++b) {
            out.set(nb[a], nb[b], e.leaf_pair);
        }
    }
    return out;
}

void apply_star_exponential(const StarSpec& spec, const StarExpEntries& e, std::span<double> z) {
    const NodeId c = spec.center();
    const double zc = z[c];
    double leaf_sum = 0.0;
    for (NodeId j : spec.neighbors()) {
        leaf_sum += z[j];
    }
    const double leaf_self = e.leaf_diag - e.leaf_pair; // e^{-t}
    for (NodeId j : spec.neighbors()) {
        z[j] = e.spoke * zc + leaf_self * z[j] + e.leaf_pair * leaf_sum;
    }
    z[c] = e.center_diag * zc + e.spoke * leaf_sum;
}

SymMatrix build_Mi(const ModelParams& p, NodeId i) {
    p.validate();
    if (i >= p.n) {
        throw ParameterError("build_Mi: node out of range");
    }
    const double T = 2.0 * p.dt;
    const double n = static_cast<double>(p.n);
    const double m = static_cast<double>(p.m);
    const StarExpEntries e = star_exp_entries(p.m, T);

    // Inclusion probabilities of a uniform m-subset of the n-1 other nodes.
    const double p_one = m / (n - 1.0);
    const double p_two = p.n > 2 ? m * (m - 1.0) / ((n - 1.0) * (n - 2.0)) : 0.0;

    const double other_diag = 1.0 - p_one * (1.0 - e.leaf_diag);
    const double spoke = p_one * e.spoke;
    const double pair = p_two * e.leaf_pair;

    SymMatrix out(p.n);
    for (NodeId k = 0; k < p.n; ++k) {
        if (k == i) {
            out.set(k, k, e.center_diag);
            continue;
        }
        out.set(k, k, other_diag);
        out.set(i, k, spoke);
        for (NodeId l = k + 1; l < p.n; ++l) {
            if (l != i) {
                out.set(k, l, pair);
            }
        }
    }
    return out;
}

SymMatrix expected_exp_weighted(const ModelParams& p, std::span<const double> w) {
    p.validate();
    if (w.size() != p.n) {
        throw ParameterError("expected_exp_weighted: weight vector must have length n");
    }
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) {
            throw ParameterError("expected_exp_weighted: weights must be non-negative");
        }
        sum += x;
    }
    if (sum > 1.0) {
        throw ParameterError("expected_exp_weighted: weights must sum to at most 1");
    }
    SymMatrix out = SymMatrix::identity(p.n) * (1.0 - sum);
    for (NodeId i = 0; i < p.n; ++i) {
        out += build_Mi(p, i) * w[i];
    }
    return out;
}

SymMatrix expected_exp_sparse(const ModelParams& p) {
    p.validate_sparse();
    return expected_exp_weighted(p, p.activity);
}

} // namespace adn
