#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
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

std::vector<double> spread_activity(std::size_t n, double total) {
    std::vector<double> a(n);
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weight += static_cast<double>(i + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = total * static_cast<double>(i + 1) / weight;
    }
    return a;
}

} // namespace

TEST_CASE("jacobi_eigenvalues agrees with Eigen") {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        Eigen::MatrixXd a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = rng.uniform(-2.0, 2.0);
            }
        }
        const SymMatrix s = SymMatrix::symmetrized(a);
        const auto jac = jacobi_eigenvalues(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.dense(), Eigen::EigenvaluesOnly);
        REQUIRE(jac.size() == n);
        CHECK(std::is_sorted(jac.begin(), jac.end()));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(jac[i] - es.eigenvalues()[static_cast<Eigen::Index>(i)]) <= 1e-11);
        }
    }
}

TEST_CASE("branch probabilities sum to one") {
    for (ModelKind kind : {ModelKind::full, ModelKind::sparse, ModelKind::fastswitch}) {
        for (std::size_t n = 2; n <= 5; ++n) {
            for (std::size_t m = 1; m < n; ++m) {
                const ModelParams p = params(n, m, spread_activity(n, 0.8), 0.7);
                const auto r = enumerate_expected_exp(p, kind, TieBreakRule::uniform());
                CHECK(r.total_probability == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(r.branches > 0);
                CHECK(static_cast<double>(r.branches) <= enumeration_size(p, kind));
            }
        }
    }
}

TEST_CASE("enumerated conditional average equals build_Mi") {
    for (std::size_t n = 3; n <= 6; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, n - 1); ++m) {
            for (double dt : {0.25, 1.0, 2.0}) {
                const ModelParams p = params(n, m, spread_activity(n, 0.9), dt);
                for (NodeId i = 0; i < n; ++i) {
                    CHECK(build_Mi(p, i).max_abs_diff(enumerate_conditional_exp(p, i, 2.0 * dt)) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("sparse enumeration equals the closed-form expectation") {
    for (std::size_t n = 3; n <= 6; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, n - 1); ++m) {
            for (double dt : {0.25, 1.0, 2.0}) {
                const ModelParams p = params(n, m, spread_activity(n, 0.9), dt);
                const auto r = enumerate_expected_exp(p, ModelKind::sparse, TieBreakRule::uniform());
                CHECK(r.expectation.max_abs_diff(expected_exp_sparse(p)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("fast-switching enumeration equals the b-weighted closed form") {
    Rng rng(52);
    for (std::size_t n = 3; n <= 5; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            std::vector<double> a(n);
            for (double& x : a) {
                x = rng.uniform(0.05, 0.9);
            }
            const ModelParams p = params(n, m, a, rng.uniform(0.05, 1.5));
            const auto b = compute_b(p, TieBreakRule::uniform());
            const auto r = enumerate_expected_exp(p, ModelKind::fastswitch, TieBreakRule::uniform());
            CHECK(r.expectation.max_abs_diff(expected_exp_weighted(p, b)) <= 1e-10);
        }
    }
}

TEST_CASE("full model, n=3, m=1, a=1/2") {
    const ModelParams p = params(3, 1, {0.5, 0.5, 0.5}, 0.5);
    const auto r = enumerate_expected_exp(p, ModelKind::full, TieBreakRule::uniform());
    const auto d = r.expectation.dense();
    for (int i = 0; i < 3; ++i) {
        CHECK(d.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.col(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < 3; ++j) {
            CHECK(d(i, j) >= -1e-12);
        }
    }
    const auto ev = jacobi_eigenvalues(r.expectation);
    CHECK(ev.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] < 1.0);
}

TEST_CASE("enumeration guard") {
    const ModelParams big = params(30, 10, std::vector<double>(30, 0.01), 1.0);
    CHECK(enumeration_size(big, ModelKind::full) > kMaxEnumerationBranches);
    try {
        enumerate_expected_exp(big, ModelKind::full, TieBreakRule::uniform());
        FAIL("expected EnumerationTooLarge");
    } catch (const EnumerationTooLarge& e) {
        CHECK(e.estimated_branches() > kMaxEnumerationBranches);
    }
    CHECK_THROWS_AS(enumerate_expected_exp(big, ModelKind::fastswitch, TieBreakRule::uniform()), EnumerationTooLarge);
    // Sparse stays polynomial.
    CHECK(enumeration_size(params(12, 3, std::vector<double>(12, 0.05), 1.0), ModelKind::sparse) <
          kMaxEnumerationBranches);
}

TEST_CASE("fast-switching inequality") {
    SUBCASE("n=4 grid") {
        const ModelParams p = params(4, 2, {0.3, 0.3, 0.3, 0.3}, 0.05);
        const auto rep = verify_fast_switch_inequality(p, TieBreakRule::uniform(), {0.01, 0.05, 0.1});
        REQUIRE(rep.rows.size() == 3);
        for (const auto& row : rep.rows) {
            CHECK(row.holds);
            CHECK(row.gap >= kInequalityFloor);
            CHECK(row.gap == doctest::Approx(row.lambda_fastswitch - row.lambda_full));
        }
        CHECK_FALSE(rep.first_failure.has_value());
    }
    SUBCASE("very small T") {
        const ModelParams p = params(4, 2, {0.3, 0.3, 0.3, 0.3}, 0.05);
        const auto rep = verify_fast_switch_inequality(p, TieBreakRule::uniform(), {1e-6});
        CHECK(rep.rows[0].gap >= kInequalityFloor);
        CHECK(std::abs(rep.rows[0].lambda_full - 1.0) <= 1e-5);
        CHECK(std::abs(rep.rows[0].lambda_fastswitch - 1.0) <= 1e-5);
    }
    SUBCASE("a single active node makes both models coincide") {
        const ModelParams p = params(4, 2, {0.5, 1e-300, 1e-300, 1e-300}, 0.05);
        const auto rep = verify_fast_switch_inequality(p, TieBreakRule::uniform(), {0.01, 0.1, 1.0});
        for (const auto& row : rep.rows) {
            CHECK(std::abs(row.gap) <= 1e-12);
        }
    }
}

TEST_CASE("validation suite") {
    ValidationOptions opts;
    const ValidationReport clean = run_validation_suite(opts);
    CHECK(clean.passed());
    CHECK_FALSE(clean.checks.empty());
    CHECK_FALSE(clean.inequality_rows.empty());

    opts.mi_perturbation = 1e-6;
    const ValidationReport broken = run_validation_suite(opts);
    CHECK_FALSE(broken.passed());

    ValidationOptions large;
    large.params = params(50, 15, std::vector<double>(50, 0.001), 3.0);
    const ValidationReport rep = run_validation_suite(large);
    CHECK(rep.passed());
    CHECK(std::any_of(rep.checks.begin(), rep.checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::refused; }));
}
