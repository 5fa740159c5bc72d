#pragma once

// Dense symmetric matrices, star graphs and their Laplacians.
//
// Node ids inside the library are 0-based. The CLI and its file formats use
// 1-based ids (V = {1, ..., n}) and convert at the boundary.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace adn {

using NodeId = std::size_t;

// Real symmetric n x n matrix. Every constructor and mutator keeps
// entries(i, j) == entries(j, i) bit for bit.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t n);

    static SymMatrix zero(std::size_t n) { return SymMatrix(n); }
    static SymMatrix identity(std::size_t n);

    // (M + M^T) / 2 of a square dense matrix.
    static SymMatrix symmetrized(const Eigen::MatrixXd& m);

    std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    double operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

    // Writes both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double value);
    void add(std::size_t i, std::size_t j, double value);

    const Eigen::MatrixXd& dense() const noexcept { return data_; }

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator-=(const SymMatrix& other);
    SymMatrix& operator*=(double s);

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    double max_abs_diff(const SymMatrix& other) const;
    bool has_nonfinite() const;

private:
    Eigen::MatrixXd data_;
};

// A star graph on n nodes: edges {center, j} for j in neighbors.
class StarSpec {
public:
    // Throws ParameterError unless center < n, neighbors are distinct ids in
    // [0, n) that exclude the center, and there is at least one neighbor.
    StarSpec(std::size_t n, NodeId center, std::vector<NodeId> neighbors);

    std::size_t n() const noexcept { return n_; }
    NodeId center() const noexcept { return center_; }
    // Sorted ascending.
    const std::vector<NodeId>& neighbors() const noexcept { return neighbors_; }
    std::size_t m() const noexcept { return neighbors_.size(); }

    friend bool operator==(const StarSpec&, const StarSpec&) = default;

private:
    std::size_t n_;
    NodeId center_;
    std::vector<NodeId> neighbors_;
};

// Exact integer symmetric matrix, used for Laplacian powers.
class IntSymMatrix {
public:
    explicit IntSymMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, std::int64_t v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

    SymMatrix to_real() const;

    friend bool operator==(const IntSymMatrix&, const IntSymMatrix&) = default;

private:
    std::size_t n_;
    std::vector<std::int64_t> data_;
};

SymMatrix star_laplacian(const StarSpec& spec);
IntSymMatrix star_laplacian_exact(const StarSpec& spec);

// Laplacian of the simple graph with the given undirected edges. Repeated
// edges collapse to a single edge.
SymMatrix laplacian_from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

// (L_{i,N})^k from the closed block form. k >= 1; throws ParameterError for
// k == 0 and when an entry would leave the int64 range.
IntSymMatrix laplacian_power_exact(const StarSpec& spec, unsigned k);
SymMatrix laplacian_power(const StarSpec& spec, unsigned k);

// e^{-t M} for symmetric M and t >= 0, via symmetric eigendecomposition.
SymMatrix expm_sym(const SymMatrix& m, double t);

} // namespace adn
