#include "adn/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "adn/closed_form.hpp"
#include "adn/errors.hpp"

namespace adn {

namespace {

// Orthonormal basis of the complement of the all-ones vector: columns 2..n
// of the Householder reflector that maps e_1 to 1/sqrt(n).
Eigen::MatrixXd complement_basis(std::size_t n) {
    const double nd = static_cast<double>(n);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(nd));
    v(0) -= 1.0;
    const double vv = v.squaredNorm();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / vv) * v * v.transpose();
    return h.rightCols(n - 1);
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw ParameterError("eigenvalue computation failed");
    }
    return eig.eigenvalues(); // ascending
}

} // namespace

std::vector<double> off_consensus_spectrum(const SymMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) {
        throw ParameterError("off-consensus spectrum needs n >= 2");
    }
    const Eigen::MatrixXd q = complement_basis(n);
    const Eigen::MatrixXd restricted = q.transpose() * m.dense() * q;
    const Eigen::VectorXd ev = sorted_eigenvalues(0.5 * (restricted + restricted.transpose()));
    return {ev.data(), ev.data() + ev.size()};
}

double lambda_second_largest(const SymMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) {
        throw ParameterError("lambda_second_largest: need n >= 2");
    }
    if (m.has_nonfinite()) {
        throw ParameterError("lambda_second_largest: non-finite entries");
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd m1 = m.dense() * ones;
    const double mu = m1.sum() / static_cast<double>(n);
    const double scale = std::max(1.0, m.dense().cwiseAbs().maxCoeff());
    if ((m1 - mu * ones).cwiseAbs().maxCoeff() <= 1e-12 * scale * static_cast<double>(n)) {
        std::vector<double> spectrum = off_consensus_spectrum(m);
        spectrum.push_back(mu);
        std::sort(spectrum.begin(), spectrum.end());
        return spectrum[n - 2];
    }
    const Eigen::VectorXd ev = sorted_eigenvalues(m.dense());
    return ev(static_cast<Eigen::Index>(n) - 2);
}

double convergence_bound(double pz0_sq, double eps, double lambda, unsigned long long K) {
    if (!(eps > 0.0)) {
        throw ParameterError("convergence_bound: eps must be positive");
    }
    if (!(pz0_sq >= 0.0) || !(lambda >= 0.0)) {
        throw ParameterError("convergence_bound: pz0_sq and lambda must be non-negative");
    }
    return pz0_sq / eps * std::pow(lambda, static_cast<double>(K));
}

DecayBound weighted_decay_bound(const ModelParams& p, const std::vector<double>& w, BoundKind kind) {
    p.validate();
    if (w.size() != p.n) {
        throw ParameterError("decay bound: weight vector must have length n");
    }
    SymMatrix weighted(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
        weighted += build_Mi(p, i) * w[i];
    }
    DecayBound out;
    out.kind = kind;
    out.weights = w;
    out.sum_w = std::accumulate(w.begin(), w.end(), 0.0);
    if (out.sum_w > 1.0 + 1e-12) {
        throw ParameterError("decay bound: weights sum to more than 1");
    }
    if (p.dt == 0.0) {
        // Every M_i is the identity: no contraction at all.
        out.lambda = out.sum_w;
        out.rate = 1.0;
        return out;
    }
    out.lambda = lambda_second_largest(weighted);
    out.rate = 1.0 - out.sum_w + out.lambda;
    return out;
}

DecayBound gamma_sp(const ModelParams& p) {
    p.validate_sparse();
    return weighted_decay_bound(p, p.activity, BoundKind::sparse);
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs) {
    std::vector<double> pmf(probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    std::size_t seen = 0;
    for (double q : probs) {
        ++seen;
        for (std::size_t k = seen; k > 0; --k) {
            pmf[k] = pmf[k] * (1.0 - q) + pmf[k - 1] * q;
        }
        pmf[0] *= (1.0 - q);
    }
    return pmf;
}

std::vector<double> compute_b(const ModelParams& p, const TieBreakRule& rule) {
    p.validate();
    if (!rule.is_uniform()) {
        return compute_b_enumerated(p, rule);
    }
    // b_i = a_i E[1 / (1 + K_i)], K_i = number of other activated nodes.
    std::vector<double> b(p.n);
    std::vector<double> others;
    others.reserve(p.n - 1);
    for (NodeId i = 0; i < p.n; ++i) {
        others.clear();
        for (NodeId j = 0; j < p.n; ++j) {
            if (j != i) {
                others.push_back(p.activity[j]);
            }
        }
        const std::vector<double> pmf = poisson_binomial_pmf(others);
        double expectation = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            expectation += pmf[k] / static_cast<double>(k + 1);
        }
        b[i] = p.activity[i] * expectation;
    }
    return b;
}

std::vector<double> compute_b_enumerated(const ModelParams& p, const TieBreakRule& rule) {
    p.validate();
    if (p.n > kMaxTableNodes) {
        throw ParameterError("compute_b: exhaustive enumeration refused for n > 20 (2^n subsets)");
    }
    std::vector<double> b(p.n, 0.0);
    const NodeSet full = (NodeSet{1} << p.n) - 1;
    for (NodeSet s = 1; s <= full; ++s) {
        double prob = 1.0;
        for (NodeId j = 0; j < p.n; ++j) {
            prob *= (s >> j & 1U) ? p.activity[j] : 1.0 - p.activity[j];
        }
        if (prob == 0.0) {
            continue;
        }
        const std::vector<double> w = rule.weights_for(s);
        std::size_t k = 0;
        for (NodeId j = 0; j < p.n; ++j) {
            if (s >> j & 1U) {
                b[j] += prob * w[k++];
            }
        }
    }
    return b;
}

DecayBound gamma_fs(const ModelParams& p, const TieBreakRule& rule) {
    return weighted_decay_bound(p, compute_b(p, rule), BoundKind::fastswitch);
}

} // namespace adn
