#include "adn/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "adn/closed_form.hpp"
#include "adn/errors.hpp"
#include "adn/spectral.hpp"

namespace adn {

std::vector<double> jacobi_eigenvalues(const SymMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = m(i, j);
        }
    }
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    double total = 0.0;
    for (double v : a) {
        total += v * v;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += at(p, q) * at(p, q);
            }
        }
        if (off <= 1e-32 * total || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[i] = at(i, i);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

double enumeration_size(const ModelParams& p, ModelKind model) {
    const double choose = binomial(p.n - 1, p.m);
    const double n = static_cast<double>(p.n);
    switch (model) {
    case ModelKind::full:
        return std::pow(1.0 + choose, n);
    case ModelKind::sparse:
        return 1.0 + n * choose;
    case ModelKind::fastswitch:
        return std::pow(2.0, n) * n * choose;
    }
    return 0.0;
}

namespace {

void guard_size(const ModelParams& p, ModelKind model) {
    const double size = enumeration_size(p, model);
    if (size > kMaxEnumerationBranches) {
        std::ostringstream msg;
        msg << "enumeration of the " << to_string(model) << " model with n=" << p.n << ", m=" << p.m
            << " needs about " << size << " branches (limit " << kMaxEnumerationBranches << ")";
        throw EnumerationTooLarge(msg.str(), size);
    }
}

std::vector<std::vector<NodeId>> subsets_of_others(std::size_t n, std::size_t m, NodeId center) {
    std::vector<std::vector<NodeId>> out;
    for_each_subset(all_nodes_except(n, center), m, [&](const std::vector<NodeId>& s) { out.push_back(s); });
    return out;
}

EnumerationResult enumerate_sparse(const ModelParams& p, double T) {
    const double idle = 1.0 - p.activity_sum();
    EnumerationResult out{SymMatrix::identity(p.n) * idle, idle, idle > 0.0 ? 1u : 0u};
    for (NodeId i = 0; i < p.n; ++i) {
        const auto subsets = subsets_of_others(p.n, p.m, i);
        const double w = p.activity[i] / static_cast<double>(subsets.size());
        for (const auto& nb : subsets) {
            out.expectation += expm_sym(star_laplacian(StarSpec(p.n, i, nb)), T) * w;
            out.total_probability += w;
            ++out.branches;
        }
    }
    return out;
}

EnumerationResult enumerate_full(const ModelParams& p, double T) {
    std::vector<std::vector<std::vector<NodeId>>> options(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
        options[i] = subsets_of_others(p.n, p.m, i);
    }
    const std::size_t radix = options[0].size() + 1;
    EnumerationResult out{SymMatrix(p.n), 0.0, 0};
    // Per-node option index: 0 = idle, r >= 1 = activated with subset r-1.
    std::vector<std::size_t> digit(p.n, 0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (true) {
        double prob = 1.0;
        edges.clear();
        for (NodeId i = 0; i < p.n; ++i) {
            if (digit[i] == 0) {
                prob *= 1.0 - p.activity[i];
            } else {
                prob *= p.activity[i] / static_cast<double>(radix - 1);
                for (NodeId j : options[i][digit[i] - 1]) {
                    edges.emplace_back(i, j);
                }
            }
        }
        if (prob > 0.0) {
            out.expectation += expm_sym(laplacian_from_edges(p.n, edges), T) * prob;
            out.total_probability += prob;
            ++out.branches;
        }
        std::size_t pos = 0;
        while (pos < p.n && ++digit[pos] == radix) {
            digit[pos++] = 0;
        }
        if (pos == p.n) {
            break;
        }
    }
    return out;
}

EnumerationResult enumerate_fastswitch(const ModelParams& p, const TieBreakRule& rule, double T) {
    if (p.n > kMaxTableNodes) {
        throw EnumerationTooLarge("fast-switching enumeration needs n <= 20", enumeration_size(p, ModelKind::fastswitch));
    }
    // Conditional expectations per survivor are shared across activated sets.
    std::vector<SymMatrix> conditional;
    conditional.reserve(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
        conditional.push_back(enumerate_conditional_exp(p, i, T));
    }
    const double per_survivor_branches = binomial(p.n - 1, p.m);
    EnumerationResult out{SymMatrix(p.n), 0.0, 0};
    const NodeSet full = (NodeSet{1} << p.n) - 1;
    for (NodeSet s = 0; s <= full; ++s) {
        double prob = 1.0;
        for (NodeId j = 0; j < p.n; ++j) {
            prob *= (s >> j & 1U) ? p.activity[j] : 1.0 - p.activity[j];
        }
        if (prob == 0.0) {
            continue;
        }
        if (s == 0) {
            out.expectation += SymMatrix::identity(p.n) * prob;
            out.total_probability += prob;
            ++out.branches;
            continue;
        }
        const std::vector<double> beta = rule.weights_for(s);
        std::size_t k = 0;
        for (NodeId i = 0; i < p.n; ++i) {
            if (!(s >> i & 1U)) {
                continue;
            }
            const double w = prob * beta[k++];
            if (w == 0.0) {
                continue;
            }
            out.expectation += conditional[i] * w;
            out.total_probability += w;
            out.branches += static_cast<std::uint64_t>(per_survivor_branches);
        }
    }
    return out;
}

} // namespace

SymMatrix enumerate_conditional_exp(const ModelParams& p, NodeId i, double T) {
    const auto subsets = subsets_of_others(p.n, p.m, i);
    SymMatrix acc(p.n);
    for (const auto& nb : subsets) {
        acc += expm_sym(star_laplacian(StarSpec(p.n, i, nb)), T);
    }
    return acc * (1.0 / static_cast<double>(subsets.size()));
}

EnumerationResult enumerate_expected_exp_at(const ModelParams& p, ModelKind model, const TieBreakRule& rule,
                                            double T) {
    if (model == ModelKind::sparse) {
        p.validate_sparse();
    } else {
        p.validate();
    }
    guard_size(p, model);
    switch (model) {
    case ModelKind::sparse:
        return enumerate_sparse(p, T);
    case ModelKind::full:
        return enumerate_full(p, T);
    case ModelKind::fastswitch:
        return enumerate_fastswitch(p, rule, T);
    }
    throw ParameterError("unknown model kind");
}

EnumerationResult enumerate_expected_exp(const ModelParams& p, ModelKind model, const TieBreakRule& rule) {
    return enumerate_expected_exp_at(p, model, rule, 2.0 * p.dt);
}

InequalityReport verify_fast_switch_inequality(const ModelParams& p, const TieBreakRule& rule,
                                               const std::vector<double>& T_grid) {
    p.validate();
    guard_size(p, ModelKind::full);
    guard_size(p, ModelKind::fastswitch);
    InequalityReport report;
    for (double T : T_grid) {
        InequalityRow row;
        row.T = T;
        row.lambda_full = lambda_second_largest(enumerate_expected_exp_at(p, ModelKind::full, rule, T).expectation);
        row.lambda_fastswitch =
            lambda_second_largest(enumerate_expected_exp_at(p, ModelKind::fastswitch, rule, T).expectation);
        row.gap = row.lambda_fastswitch - row.lambda_full;
        row.holds = row.gap >= kInequalityFloor;
        if (!row.holds && (!report.first_failure || T < *report.first_failure)) {
            report.first_failure = T;
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace adn
