#include "adn/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adn/errors.hpp"

namespace adn {

SymMatrix::SymMatrix(std::size_t n) : data_(Eigen::MatrixXd::Zero(n, n)) {
    if (n == 0) {
        throw ParameterError("SymMatrix: dimension must be at least 1");
    }
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix out(n);
    out.data_.setIdentity();
    return out;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw ParameterError("SymMatrix::symmetrized: matrix is not square");
    }
    SymMatrix out(static_cast<std::size_t>(m.rows()));
    out.data_ = 0.5 * (m + m.transpose());
    // The average is symmetric mathematically; copy the upper triangle down
    // so it is also symmetric bit for bit.
    out.data_.triangularView<Eigen::StrictlyLower>() = out.data_.transpose();
    return out;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
    data_(i, j) = value;
    data_(j, i) = value;
}

void SymMatrix::add(std::size_t i, std::size_t j, double value) {
    data_(i, j) += value;
    if (i != j) {
        data_(j, i) = data_(i, j);
    }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    if (other.size() != size()) {
        throw ParameterError("SymMatrix: dimension mismatch");
    }
    data_ += other.data_;
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
    if (other.size() != size()) {
        throw ParameterError("SymMatrix: dimension mismatch");
    }
    data_ -= other.data_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    data_ *= s;
    return *this;
}

double SymMatrix::max_abs_diff(const SymMatrix& other) const {
    if (other.size() != size()) {
        throw ParameterError("SymMatrix: dimension mismatch");
    }
    return (data_ - other.data_).cwiseAbs().maxCoeff();
}

bool SymMatrix::has_nonfinite() const { return !data_.allFinite(); }

StarSpec::StarSpec(std::size_t n, NodeId center, std::vector<NodeId> neighbors)
    : n_(n), center_(center), neighbors_(std::move(neighbors)) {
    if (n_ < 2) {
        throw ParameterError("StarSpec: need n >= 2");
    }
    if (center_ >= n_) {
        throw ParameterError("StarSpec: center " + std::to_string(center_) + " out of range");
    }
    if (neighbors_.empty()) {
        throw ParameterError("StarSpec: neighbor set must be non-empty");
    }
    std::sort(neighbors_.begin(), neighbors_.end());
    if (std::adjacent_find(neighbors_.begin(), neighbors_.end()) != neighbors_.end()) {
        throw ParameterError("StarSpec: duplicate neighbor");
    }
    for (NodeId j : neighbors_) {
        if (j >= n_) {
            throw ParameterError("StarSpec: neighbor " + std::to_string(j) + " out of range");
        }
        if (j == center_) {
            throw ParameterError("StarSpec: center listed among its neighbors");
        }
    }
}

SymMatrix IntSymMatrix::to_real() const {
    SymMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            out.set(i, j, static_cast<double>((*this)(i, j)));
        }
    }
    return out;
}

IntSymMatrix star_laplacian_exact(const StarSpec& spec) {
    IntSymMatrix out(spec.n());
    const NodeId c = spec.center();
    out.set(c, c, static_cast<std::int64_t>(spec.m()));
    for (NodeId j : spec.neighbors()) {
        out.set(j, j, 1);
        out.set(c, j, -1);
    }
    return out;
}

SymMatrix star_laplacian(const StarSpec& spec) { return star_laplacian_exact(spec).to_real(); }

SymMatrix laplacian_from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    SymMatrix out(n);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n || u == v) {
            throw ParameterError("laplacian_from_edges: invalid edge");
        }
        if (out(u, v) != 0.0) {
            continue;
        }
        out.set(u, v, -1.0);
        out.add(u, u, 1.0);
        out.add(v, v, 1.0);
    }
    return out;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ParameterError("laplacian_power: entry exceeds the 64-bit integer range");
    }
    return r;
}

} // namespace

IntSymMatrix laplacian_power_exact(const StarSpec& spec, unsigned k) {
    if (k == 0) {
        throw ParameterError("laplacian_power: k must be at least 1");
    }
    const auto m = static_cast<std::int64_t>(spec.m());
    std::int64_t p = 1; // (m+1)^(k-1)
    for (unsigned e = 1; e < k; ++e) {
        p = checked_mul(p, m + 1);
    }
    // (m+1)^(k-1) = 1 (mod m), so the division is exact.
    const std::int64_t clique = (p - 1) / m;

    IntSymMatrix out(spec.n());
    const NodeId c = spec.center();
    out.set(c, c, checked_mul(m, p));
    const auto& nb = spec.neighbors();
    for (std::size_t a = 0; a < nb.size(); ++a) {
        out.set(c, nb[a], -p);
        out.set(nb[a], nb[a], 1 + clique);
        for (std::size_t b = a + 1; b < nb.size(); ++b) {
            out.set(nb[a], nb[b], clique);
        }
    }
    return out;
}

SymMatrix laplacian_power(const StarSpec& spec, unsigned k) {
    return laplacian_power_exact(spec, k).to_real();
}

SymMatrix expm_sym(const SymMatrix& m, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ParameterError("expm_sym: t must be finite and non-negative");
    }
    if (m.has_nonfinite()) {
        throw ParameterError("expm_sym: matrix has non-finite entries");
    }
    if (t == 0.0) {
        return SymMatrix::identity(m.size());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.dense());
    if (eig.info() != Eigen::Success) {
        throw ParameterError("expm_sym: eigendecomposition failed");
    }
    const Eigen::VectorXd scale = (-t * eig.eigenvalues()).array().exp();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    return SymMatrix::symmetrized(v * scale.asDiagonal() * v.transpose());
}

} // namespace adn
