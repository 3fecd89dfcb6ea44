#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "seqtune/dist_fit.hpp"
#include "seqtune/rng.hpp"

using namespace seqtune;

namespace {

std::vector<double> exponential_draws(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = -std::log(1.0 - rng.uniform());
    return v;
}

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, double mu = 0.0,
                                 double sd = 1.0) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal(mu, sd);
    return v;
}

// losses that look like bootstrap MSE values: positive, right-skewed
std::vector<double> skewed_sample(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 3.0 * std::exp(rng.normal(0.8, 0.4));
    return v;
}

}  // namespace

TEST_SUITE("dist_fit") {
    TEST_CASE("lognormal and normal closed forms match hand arithmetic") {
        // logs are {0, 2, 0, 2, 2}: mean 1.2, 1/n variance 0.96
        const std::vector<double> s = {1.0, std::exp(2.0), 1.0, std::exp(2.0), std::exp(2.0)};
        const auto ln = fit_mle(s, DistFamily::lognormal, 0.0);
        CHECK(ln.params[0] == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(ln.params[1] * ln.params[1] == doctest::Approx(0.96).epsilon(1e-12));

        const std::vector<double> t = {1.0, 2.0, 3.0, 5.0, 9.0};  // mean 4, 1/n var 8
        const auto nm = fit_mle(t, DistFamily::normal, 0.0);
        CHECK(nm.params[0] == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(nm.params[1] * nm.params[1] == doctest::Approx(8.0).epsilon(1e-12));
    }

    TEST_CASE("constant sample is rejected as a support violation") {
        const std::vector<double> s = {2.0, 2.0, 2.0, 2.0};
        CHECK_THROWS_AS(fit_mle(s, DistFamily::normal, 0.0), SupportError);
        CHECK_THROWS_AS(fit_mle(s, DistFamily::gamma, 0.0), SupportError);
    }

    TEST_CASE("gamma fit recovers the exponential shape") {
        const auto s = exponential_draws(5000, 42);
        const auto fit = fit_mle(s, DistFamily::gamma, 0.0);
        CHECK(std::fabs(fit.params[0] - 1.0) < 0.05);  // exponential(1) = gamma(1, 1)
    }

    TEST_CASE("cvm single observation at F = 0.5 gives 1/12") {
        const std::vector<double> s = {3.7};
        const double t = cvm_criterion(s, [](double) { return 0.5; });
        CHECK(t == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    }

    TEST_CASE("cvm equals its lower bound exactly at the perfect fit") {
        const std::size_t n = 17;
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i + 1);
        const double t = cvm_criterion(s, [n](double x) {
            return (2.0 * x - 1.0) / (2.0 * static_cast<double>(n));
        });
        CHECK(t == doctest::Approx(1.0 / (12.0 * static_cast<double>(n))).epsilon(1e-12));
    }

    TEST_CASE("cvm never falls below 1/(12n)") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const auto s = normal_draws(50, rng.next_u64());
            const auto fit = fit_mle(s, DistFamily::normal, 0.0);
            const double t = cvm_criterion(s, [&](double x) { return fit_cdf(fit, x); });
            CHECK(t >= 1.0 / (12.0 * 50.0));
        }
    }

    TEST_CASE("cvm is invariant under affine maps of sample and cdf") {
        const auto s = normal_draws(200, 9, 2.0, 3.0);
        const auto fit = fit_mle(s, DistFamily::normal, 0.0);
        const double t1 = cvm_criterion(s, [&](double x) { return fit_cdf(fit, x); });
        const double a = 2.5, b = -7.0;
        std::vector<double> mapped(s.size());
        std::transform(s.begin(), s.end(), mapped.begin(), [&](double x) { return a * x + b; });
        const double t2 =
            cvm_criterion(mapped, [&](double x) { return fit_cdf(fit, (x - b) / a); });
        CHECK(t1 == doctest::Approx(t2).epsilon(1e-12));
    }

    TEST_CASE("normal fit to truly normal data scores below 0.5") {
        const auto s = normal_draws(1000, 31337, 5.0, 2.0);
        const auto fit = fit_mle(s, DistFamily::normal, 0.0);
        const double t = cvm_criterion(s, [&](double x) { return fit_cdf(fit, x); });
        CHECK(t < 0.5);
    }

    TEST_CASE("loglik at the optimum is at least the moment-start loglik") {
        const auto s = skewed_sample(400, 77);
        for (const auto family :
             {DistFamily::normal, DistFamily::lognormal, DistFamily::gamma, DistFamily::loggamma,
              DistFamily::invgamma, DistFamily::weibull, DistFamily::invweibull}) {
            const auto fit = fit_mle(s, family, 0.0);
            const auto start = moment_start(s, family, 0.0);
            CHECK(fit.loglik >= family_loglik(s, family, 0.0, start) - 1e-9);
        }
        // beta needs samples in (0, 1)
        std::vector<double> unit(s.size());
        std::transform(s.begin(), s.end(), unit.begin(),
                       [&](double x) { return x / (1.0 + *std::max_element(s.begin(), s.end())); });
        const auto fitb = fit_mle(unit, DistFamily::beta, 0.0);
        CHECK(fitb.loglik >= family_loglik(unit, DistFamily::beta, 0.0, moment_start(unit, DistFamily::beta, 0.0)) - 1e-9);
    }

    TEST_CASE("shift search skips inadmissible shifts and minimizes cvm") {
        // contains 0, so lognormal needs c > 0
        std::vector<double> s = {0.0, 0.1, 0.15, 0.2, 0.05, 0.3, 0.1, 0.25, 0.12, 0.18,
                                 0.08, 0.22, 0.14, 0.02, 0.27, 0.11, 0.19, 0.06, 0.16, 0.09};
        const auto best = shift_search(s, DistFamily::lognormal);
        CHECK(best.shift > 0.0);
        for (double c : shift_candidates()) {
            if (!shift_admissible(s, DistFamily::lognormal, c)) continue;
            auto fit = fit_mle(s, DistFamily::lognormal, c);
            fit.cvm = cvm_criterion(s, [&](double x) { return fit_cdf(fit, x); });
            CHECK(best.cvm <= fit.cvm + 1e-12);
        }
    }

    TEST_CASE("beta admits only shifts that keep values inside (0, 1)") {
        std::vector<double> s = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.15, 0.25, 0.35, 0.45,
                                 0.02, 0.12, 0.22, 0.32, 0.42, 0.08, 0.18, 0.28, 0.38, 0.48};
        CHECK_FALSE(shift_admissible(s, DistFamily::beta, 0.0));   // contains 0
        CHECK_FALSE(shift_admissible(s, DistFamily::beta, 1.0));   // pushes past 1
        CHECK(shift_admissible(s, DistFamily::beta, 0.25));
        const auto best = shift_search(s, DistFamily::beta);
        CHECK(best.shift > 0.0);
        CHECK(best.shift + 0.48 < 1.0);
    }

    TEST_CASE("loggamma needs shifted samples above 1") {
        std::vector<double> s = {0.2, 0.3, 0.4, 0.5, 0.6, 0.35, 0.45, 0.55, 0.25, 0.65};
        CHECK_FALSE(shift_admissible(s, DistFamily::loggamma, 0.0));
        CHECK(shift_admissible(s, DistFamily::loggamma, 1.0));
    }

    TEST_CASE("inverse families fit the reciprocal scale") {
        const auto s = skewed_sample(500, 13);
        const auto ig = fit_mle(s, DistFamily::invgamma, 0.0);
        CHECK(ig.params[0] > 0.0);
        CHECK(ig.params[1] > 0.0);
        // the cdf must be a proper monotone distribution function
        double prev = 0.0;
        for (double q : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
            const double f = fit_cdf(ig, q);
            CHECK(f >= prev - 1e-12);
            prev = f;
        }
        const auto iw = fit_mle(s, DistFamily::invweibull, 0.0);
        CHECK(fit_cdf(iw, 1e9) > 0.999);
    }

    TEST_CASE("dist_study emits one row per config and family, deterministically") {
        const auto ds = make_synthetic(SyntheticKind::linear_regression, 60, 3, 1.0, 15);
        const auto space = default_space(LearnerKind::elastic_net);
        const auto rows = dist_study(ds, LearnerKind::elastic_net, space, 2, 50, 99);
        CHECK(rows.size() == 2 * candidate_families(TaskKind::regression).size());
        const auto rows2 = dist_study(ds, LearnerKind::elastic_net, space, 2, 50, 99);
        REQUIRE(rows.size() == rows2.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].cvm == rows2[i].cvm);
            CHECK(rows[i].c == rows2[i].c);
        }
        const auto summary = dist_study_summary(rows);
        CHECK(summary.size() == candidate_families(TaskKind::regression).size());
        for (std::size_t i = 1; i < summary.size(); ++i)
            CHECK(summary[i - 1].second <= summary[i].second);
    }
}
