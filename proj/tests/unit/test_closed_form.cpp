#include <doctest.h>

#include <cmath>

#include "adn/closed_form.hpp"
#include "adn/errors.hpp"
#include "adn/spectral.hpp"
#include "adn/validation.hpp"
#include "oracles.hpp"

using namespace adn;

namespace {

ModelParams params(std::size_t n, std::size_t m, std::vector<double> a, double dt) {
    ModelParams p;
    p.n = n;
    p.m = m;
    p.activity = std::move(a);
    p.dt = dt;
    return p;
}

// Average of expm_sym over every m-subset, written out directly.
SymMatrix subset_average(std::size_t n, std::size_t m, NodeId i, double T) {
    SymMatrix acc(n);
    double count = 0.0;
    for_each_subset(all_nodes_except(n, i), m, [&](const std::vector<NodeId>& nb) {
        acc += expm_sym(star_laplacian(StarSpec(n, i, nb)), T);
        count += 1.0;
    });
    return acc * (1.0 / count);
}

void check_doubly_stochastic(const SymMatrix& m, double tol) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            CHECK(m(i, j) == m(j, i));
            CHECK(m(i, j) >= 0.0);
            row += m(i, j);
        }
        CHECK(std::abs(row - 1.0) <= tol);
    }
}

} // namespace

TEST_CASE("star_exponential: t = 0 is the identity") {
    CHECK(star_exponential(StarSpec(6, 3, {0, 1, 5}), 0.0).max_abs_diff(SymMatrix::identity(6)) == 0.0);
}

TEST_CASE("star_exponential: n=2, m=1, t=1") {
    const SymMatrix e = star_exponential(StarSpec(2, 0, {1}), 1.0);
    CHECK(e(0, 0) == doctest::Approx(0.567667641618306346).epsilon(1e-15));
    CHECK(e(1, 1) == doctest::Approx(0.567667641618306346).epsilon(1e-15));
    CHECK(e(0, 1) == doctest::Approx(0.432332358381693654).epsilon(1e-15));
}

TEST_CASE("star_exponential equals expm_sym and the Taylor oracle") {
    Rng rng(21);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            const StarSpec spec = oracle::random_star(n, m, rng);
            for (double t : {0.1, 0.3, 0.5, 1.0, 2.0, 2.7, 5.0}) {
                const SymMatrix closed = star_exponential(spec, t);
                CHECK(closed.max_abs_diff(expm_sym(star_laplacian(spec), t)) <= 1e-10);
                CHECK(oracle::max_abs_diff(closed, oracle::taylor_expm(star_laplacian(spec), t)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("apply_star_exponential equals the dense product") {
    Rng rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        const std::size_t m = 1 + rng.below(n - 1);
        const StarSpec spec = oracle::random_star(n, m, rng);
        const double t = rng.uniform(0.0, 4.0);
        std::vector<double> z(n);
        for (double& v : z) {
            v = rng.uniform(-1.0, 1.0);
        }
        const Eigen::VectorXd expected =
            expm_sym(star_laplacian(spec), t).dense() * Eigen::Map<const Eigen::VectorXd>(z.data(), n);
        apply_star_exponential(spec, star_exp_entries(m, t), z);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(z[i] - expected(i)) <= 1e-10);
        }
    }
}

TEST_CASE("build_Mi: dt = 0 gives the identity") {
    const ModelParams p = params(5, 2, std::vector<double>(5, 0.1), 0.0);
    for (NodeId i = 0; i < 5; ++i) {
        CHECK(build_Mi(p, i).max_abs_diff(SymMatrix::identity(5)) == 0.0);
    }
}

TEST_CASE("build_Mi: center diagonal for m=4, T=4") {
    const ModelParams p = params(9, 4, std::vector<double>(9, 0.05), 2.0);
    // 1 - m (1 - e^{-(m+1)T}) / (m+1)
    CHECK(build_Mi(p, 3)(3, 3) == doctest::Approx(0.200000001648922898).epsilon(1e-14));
}

TEST_CASE("build_Mi matches the entrywise formulas") {
    for (std::size_t n : {3u, 5u, 8u}) {
        for (std::size_t m = 1; m < n; ++m) {
            for (double dt : {0.1, 0.75, 2.0}) {
                const ModelParams p = params(n, m, std::vector<double>(n, 0.05), dt);
                const double T = 2.0 * dt;
                const double md = static_cast<double>(m);
                const double nd = static_cast<double>(n);
                const double big = std::exp(-(md + 1.0) * T);
                const double small = std::exp(-T);
                const double ii = 1.0 - md * (1.0 - big) / (md + 1.0);
                const double kk = 1.0 + ((md * md - 1.0) * small + big - md * md) / ((md + 1.0) * (nd - 1.0));
                const double ik = md * (1.0 - big) / ((md + 1.0) * (nd - 1.0));
                const double kl = (md - 1.0) * (md + big - (md + 1.0) * small) / ((md + 1.0) * (nd - 1.0) * (nd - 2.0));
                const SymMatrix mi = build_Mi(p, 1);
                for (NodeId k = 0; k < n; ++k) {
                    for (NodeId l = 0; l < n; ++l) {
                        double expected;
                        if (k == 1 && l == 1) {
                            expected = ii;
                        } else if (k == l) {
                            expected = kk;
                        } else if (k == 1 || l == 1) {
                            expected = ik;
                        } else {
                            expected = kl;
                        }
                        CHECK(mi(k, l) == doctest::Approx(expected).epsilon(1e-12));
                    }
                }
            }
        }
    }
}

TEST_CASE("build_Mi equals the exhaustive subset average") {
    for (std::size_t n = 2; n <= 6; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, n - 1); ++m) {
            for (double T : {0.5, 2.0}) {
                const ModelParams p = params(n, m, std::vector<double>(n, 0.1), T / 2.0);
                for (NodeId i = 0; i < n; ++i) {
                    CHECK(build_Mi(p, i).max_abs_diff(subset_average(n, m, i, T)) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("M_i is symmetric, nonnegative, doubly stochastic; row identity") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.below(10);
        const std::size_t m = 1 + rng.below(n - 1);
        const ModelParams p = params(n, m, std::vector<double>(n, 0.01), rng.uniform(0.0, 5.0));
        const NodeId i = rng.below(n);
        const SymMatrix mi = build_Mi(p, i);
        check_doubly_stochastic(mi, 1e-12);
        const NodeId k = (i + 1) % n;
        const NodeId l = (i + 2) % n;
        CHECK(std::abs(mi(k, k) + mi(k, i) + static_cast<double>(n - 2) * mi(k, l) - 1.0) <= 1e-12);
    }
}

TEST_CASE("expected_exp_sparse") {
    SUBCASE("vanishing activity gives the identity") {
        const ModelParams p = params(4, 2, std::vector<double>(4, 1e-300), 1.0);
        CHECK(expected_exp_sparse(p).max_abs_diff(SymMatrix::identity(4)) <= 1e-12);
    }
    SUBCASE("n=5, m=2, a=0.02, dt=1 equals the event enumeration") {
        const ModelParams p = params(5, 2, std::vector<double>(5, 0.02), 1.0);
        const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::sparse, TieBreakRule::uniform()).expectation;
        CHECK(expected_exp_sparse(p).max_abs_diff(oracle) <= 1e-10);
    }
    SUBCASE("random parameters: doubly stochastic, spectrum in (0, 1], eigenvector 1") {
        Rng rng(24);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + rng.below(10);
            const std::size_t m = 1 + rng.below(n - 1);
            std::vector<double> a(n);
            for (double& x : a) {
                x = rng.uniform(1e-6, 1.0 / static_cast<double>(n));
            }
            const ModelParams p = params(n, m, a, rng.uniform(0.01, 4.0));
            const SymMatrix e = expected_exp_sparse(p);
            check_doubly_stochastic(e, 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.dense());
            CHECK(eig.eigenvalues().minCoeff() > 0.0);
            CHECK(eig.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
            const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
            CHECK((e.dense() * ones - ones).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("sum a > 1 is refused") {
        CHECK_THROWS_AS(expected_exp_sparse(params(3, 1, {0.5, 0.4, 0.3}, 1.0)), ParameterError);
    }
}

TEST_CASE("expected_exp_weighted") {
    const ModelParams p = params(4, 2, {0.3, 0.3, 0.3, 0.3}, 0.05);
    const std::vector<double> zero(4, 0.0);
    CHECK(expected_exp_weighted(p, zero).max_abs_diff(SymMatrix::identity(4)) == 0.0);

    const ModelParams q = params(4, 2, {0.1, 0.2, 0.05, 0.3}, 0.7);
    CHECK(expected_exp_weighted(q, q.activity).max_abs_diff(expected_exp_sparse(q)) == 0.0);

    const auto b = compute_b(p, TieBreakRule::uniform());
    const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::fastswitch, TieBreakRule::uniform()).expectation;
    CHECK(expected_exp_weighted(p, b).max_abs_diff(oracle) <= 1e-10);

    const std::vector<double> negative{0.1, -0.1, 0.1, 0.1};
    CHECK_THROWS_AS(expected_exp_weighted(p, negative), ParameterError);
    const std::vector<double> heavy{0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(expected_exp_weighted(p, heavy), ParameterError);
}
