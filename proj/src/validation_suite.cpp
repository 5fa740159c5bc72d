#include <algorithm>
#include <cmath>
#include <sstream>

#include "adn/closed_form.hpp"
#include "adn/errors.hpp"
#include "adn/spectral.hpp"
#include "adn/validation.hpp"

namespace adn {

bool ValidationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

namespace {

class Check {
public:
    Check(std::string name, double tolerance) {
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void observe(double err, const std::string& where) {
        if (!(err <= result_.max_error) || std::isnan(err)) {
            result_.max_error = std::isnan(err) ? INFINITY : err;
            worst_ = where;
        }
    }

    CheckResult finish() {
        result_.status = result_.max_error <= result_.tolerance ? CheckStatus::pass : CheckStatus::fail;
        if (!worst_.empty()) {
            result_.detail = "worst case: " + worst_;
        }
        return result_;
    }

private:
    CheckResult result_;
    std::string worst_;
};

CheckResult refused(std::string name, const EnumerationTooLarge& e) {
    CheckResult r;
    r.name = std::move(name);
    r.status = CheckStatus::refused;
    r.detail = e.what();
    return r;
}

ModelParams make_params(std::size_t n, std::size_t m, double dt, std::vector<double> a) {
    ModelParams p;
    p.n = n;
    p.m = m;
    p.dt = dt;
    p.activity = std::move(a);
    return p;
}

std::vector<double> ramp_rates(std::size_t n, double base, double slope) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = base + slope * static_cast<double>(i);
    }
    return a;
}

std::string describe(const ModelParams& p) {
    std::ostringstream s;
    s << "n=" << p.n << " m=" << p.m << " dt=" << p.dt;
    return s.str();
}

SymMatrix closed_form_Mi(const ModelParams& p, NodeId i, double perturbation) {
    SymMatrix mi = build_Mi(p, i);
    if (perturbation != 0.0) {
        mi.add(0, 0, perturbation);
    }
    return mi;
}

SymMatrix closed_form_expectation(const ModelParams& p, const std::vector<double>& w, double perturbation) {
    double sum = 0.0;
    SymMatrix out(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
        out += closed_form_Mi(p, i, perturbation) * w[i];
        sum += w[i];
    }
    return out + SymMatrix::identity(p.n) * (1.0 - sum);
}

CheckResult check_star_exponential() {
    Check check("star exponential closed form vs eigendecomposition", 1e-10);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            std::vector<NodeId> nb;
            for (std::size_t j = 0; j < m; ++j) {
                nb.push_back(n - 1 - j);
            }
            const StarSpec spec(n, 0, nb);
            for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                const double err = star_exponential(spec, t).max_abs_diff(expm_sym(star_laplacian(spec), t));
                check.observe(err, "n=" + std::to_string(n) + " m=" + std::to_string(m));
            }
        }
    }
    return check.finish();
}

CheckResult check_mi(double perturbation) {
    Check check("M_i closed form vs subset enumeration", 1e-10);
    for (std::size_t n = 3; n <= 6; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, n - 1); ++m) {
            for (double dt : {0.25, 1.0, 2.0}) {
                const ModelParams p = make_params(n, m, dt, std::vector<double>(n, 0.1));
                for (NodeId i = 0; i < n; ++i) {
                    const double err =
                        closed_form_Mi(p, i, perturbation).max_abs_diff(enumerate_conditional_exp(p, i, 2.0 * dt));
                    check.observe(err, describe(p) + " i=" + std::to_string(i + 1));
                }
            }
        }
    }
    return check.finish();
}

CheckResult check_sparse_expectation(double perturbation) {
    Check check("sparse expectation vs event enumeration", 1e-10);
    const TieBreakRule rule = TieBreakRule::uniform();
    for (std::size_t n = 3; n <= 6; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, n - 1); ++m) {
            for (double dt : {0.25, 1.0, 2.0}) {
                const ModelParams p = make_params(n, m, dt, ramp_rates(n, 0.05, 0.01));
                const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::sparse, rule).expectation;
                check.observe(closed_form_expectation(p, p.activity, perturbation).max_abs_diff(oracle), describe(p));
            }
        }
    }
    return check.finish();
}

CheckResult check_b() {
    Check check("survivor weights b: Poisson-binomial vs 2^n enumeration", 1e-12);
    Rng rng(20240611);
    const TieBreakRule rule = TieBreakRule::uniform();
    for (std::size_t n = 2; n <= 12; ++n) {
        std::vector<double> a(n);
        for (double& x : a) {
            x = rng.uniform(0.01, 1.0);
        }
        const ModelParams p = make_params(n, 1, 1.0, a);
        const auto dp = compute_b(p, rule);
        const auto brute = compute_b_enumerated(p, rule);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            err = std::max(err, std::abs(dp[i] - brute[i]));
        }
        check.observe(err, "n=" + std::to_string(n));
    }
    return check.finish();
}

CheckResult check_fastswitch_expectation(double perturbation) {
    Check check("fast-switching expectation vs 2^n enumeration", 1e-10);
    const TieBreakRule rule = TieBreakRule::uniform();
    for (std::size_t n = 3; n <= 5; ++n) {
        for (std::size_t m = 1; m <= 2; ++m) {
            for (double dt : {0.05, 0.5}) {
                const ModelParams p = make_params(n, m, dt, ramp_rates(n, 0.2, 0.1));
                const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::fastswitch, rule).expectation;
                const auto b = compute_b(p, rule);
                check.observe(closed_form_expectation(p, b, perturbation).max_abs_diff(oracle), describe(p));
            }
        }
    }
    return check.finish();
}

CheckResult inequality_check(const std::string& name, const ModelParams& p, const TieBreakRule& rule,
                             const std::vector<double>& grid, std::vector<InequalityRow>& rows) {
    const InequalityReport report = verify_fast_switch_inequality(p, rule, grid);
    Check check(name, 0.0);
    for (const auto& row : report.rows) {
        // Only a gap below the floating-point floor counts as a violation.
        check.observe(row.holds ? 0.0 : -row.gap, "T=" + std::to_string(row.T));
        rows.push_back(row);
    }
    CheckResult r = check.finish();
    if (report.first_failure) {
        r.detail = "first failure at T=" + std::to_string(*report.first_failure);
    }
    return r;
}

void run_config_checks(const ValidationOptions& opts, ValidationReport& report) {
    const ModelParams& p = *opts.params;
    const std::string tag = " [config " + describe(p) + "]";

    if (p.activity_sum() <= 1.0) {
        const std::string name = "sparse expectation vs event enumeration" + tag;
        try {
            const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::sparse, opts.rule).expectation;
            Check check(name, 1e-10);
            check.observe(closed_form_expectation(p, p.activity, opts.mi_perturbation).max_abs_diff(oracle),
                          describe(p));
            report.checks.push_back(check.finish());
        } catch (const EnumerationTooLarge& e) {
            report.checks.push_back(refused(name, e));
        }
    }

    {
        const std::string name = "fast-switching expectation vs 2^n enumeration" + tag;
        try {
            const SymMatrix oracle = enumerate_expected_exp(p, ModelKind::fastswitch, opts.rule).expectation;
            Check check(name, 1e-10);
            const auto b = compute_b(p, opts.rule);
            check.observe(closed_form_expectation(p, b, opts.mi_perturbation).max_abs_diff(oracle), describe(p));
            report.checks.push_back(check.finish());
        } catch (const EnumerationTooLarge& e) {
            report.checks.push_back(refused(name, e));
        }
    }

    {
        const std::string name = "fast-switching eigenvalue inequality" + tag;
        try {
            std::vector<double> grid{0.01, 0.05, 0.1};
            if (p.dt > 0.0) {
                grid.push_back(2.0 * p.dt);
            }
            report.checks.push_back(inequality_check(name, p, opts.rule, grid, report.inequality_rows));
        } catch (const EnumerationTooLarge& e) {
            report.checks.push_back(refused(name, e));
        }
    }
}

} // namespace

ValidationReport run_validation_suite(const ValidationOptions& opts) {
    ValidationReport report;
    report.checks.push_back(check_star_exponential());
    report.checks.push_back(check_mi(opts.mi_perturbation));
    report.checks.push_back(check_sparse_expectation(opts.mi_perturbation));
    report.checks.push_back(check_b());
    report.checks.push_back(check_fastswitch_expectation(opts.mi_perturbation));

    const ModelParams ineq = make_params(4, 2, 0.05, std::vector<double>(4, 0.3));
    report.checks.push_back(inequality_check("fast-switching eigenvalue inequality (n=4, m=2, a=0.3)", ineq,
                                             TieBreakRule::uniform(), {0.01, 0.05, 0.1}, report.inequality_rows));

    if (opts.params) {
        run_config_checks(opts, report);
    }
    return report;
}

} // namespace adn
