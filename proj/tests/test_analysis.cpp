// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/analysis.hpp>
#include <stakesim/types.hpp>

#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include <cmath>

using namespace stakesim;
using namespace stakesim::analysis;

namespace {

// P(Bin(2l-1, a) >= l) = I_a(l, l), the regularized incomplete beta function.
double beta_oracle(double alpha, std::uint64_t ell)
{
    const double l = static_cast<double>(ell);
    return boost::math::ibeta(l, l, alpha);
}

} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("race probability matches exhaustive enumeration")
    {
        for (double a : {0.1, 0.25, 1.0 / 3.0, 0.4, 0.49}) {
            for (std::uint64_t ell = 1; ell <= 6; ++ell) {
                CHECK(std::abs(race_probability(a, ell) - exhaustive_race(a, ell)) <= 1e-12);
            }
        }
    }

    TEST_CASE("race probability matches the incomplete beta oracle")
    {
        for (double a : {0.01, 0.1, 0.3, 0.45, 0.499}) {
            for (std::uint64_t ell : {1, 2, 7, 30, 100, 400}) {
                const double want = beta_oracle(a, ell);
                if (want < 1e-300) continue;
                CHECK(std::abs(race_probability(a, ell) / want - 1.0) < 1e-9);
            }
        }
        // Deep tails stay accurate in log space.
        CHECK(std::abs(log_race_probability({0.4, 812}) - std::log(beta_oracle(0.4, 812))) < 1e-9);
    }

    TEST_CASE("symmetry, complement and monotonicity")
    {
        for (std::uint64_t ell = 1; ell <= 1000; ++ell) {
            CHECK(std::abs(race_probability(0.5, ell) - 0.5) <= 1e-12);
        }
        for (double a : {0.05, 0.2, 0.35, 0.45}) {
            for (std::uint64_t ell : {1, 3, 10, 50}) {
                CHECK(std::abs(race_probability(a, ell) + race_probability(1 - a, ell) - 1.0) < 1e-12);
                CHECK(race_probability(a, ell + 1) < race_probability(a, ell));
                CHECK(race_probability(a + 0.01, ell) > race_probability(a, ell));
            }
        }
        CHECK(race_probability(0.0, 3) == 0.0);
        CHECK(race_probability(1.0, 3) == 1.0);
    }

    TEST_CASE("race inputs outside the domain are rejected")
    {
        CHECK_THROWS_AS(race_probability(-0.1, 3), DomainError);
        CHECK_THROWS_AS(race_probability(1.1, 3), DomainError);
        CHECK_THROWS_AS(race_probability(0.3, 0), DomainError);
        CHECK_THROWS_AS(exhaustive_race(0.3, 7), DomainError);
        CHECK_THROWS_AS(min_safe_window(0.3, 0.0), DomainError);
        CHECK_THROWS_AS(lifetime_threshold(0, 0.1), DomainError);
    }

    TEST_CASE("safe window is the first length below the tolerance")
    {
        // Frozen from the incomplete beta oracle: p(811) = 2.044e-16, p(812) = 1.961e-16.
        const auto w = min_safe_window(0.40, 2e-16);
        REQUIRE(w.has_value());
        CHECK(*w == 812);
        CHECK(beta_oracle(0.40, 811) >= 2e-16);
        CHECK(beta_oracle(0.40, 812) < 2e-16);
        CHECK(*min_safe_window(0.40, 1e-3) == 118);
        CHECK_FALSE(min_safe_window(0.5, 1e-3).has_value());
        CHECK(*min_safe_window(0.0, 0.5) == 1);
        for (double a : {0.1, 0.2, 0.3, 0.45}) {
            for (double T : {1e-3, 1e-9, 2e-16}) {
                const auto l = *min_safe_window(a, T);
                CHECK(race_probability(a, l) < T);
                if (l > 1) CHECK(race_probability(a, l - 1) >= T);
            }
        }
    }

    TEST_CASE("lifetime threshold")
    {
        CHECK(lifetime_threshold(500000000, 1e-7) == 2e-16);
        CHECK(lifetime_threshold(1, 0.25) == 0.25);
    }

    TEST_CASE("undetectable nothing-at-stake bound")
    {
        const auto b = unas_rate_bound(10, 101);
        CHECK(b.multiplier == doctest::Approx(2.0 - 20.0 / 102.0));
        CHECK(b.defense_required);
        CHECK_FALSE(unas_rate_bound(60, 101).defense_required);
        CHECK(unas_rate_bound(0, 5).multiplier == 2.0);
    }

    TEST_CASE("exponential forking trajectory")
    {
        const auto f = exp_fork_trajectory(0.1, 1.0, 0.0, 10);
        CHECK(f.x == doctest::Approx(std::pow(1.1, 10)));
        CHECK(f.y == doctest::Approx(9.0));
        CHECK(exp_fork_trajectory(0.1, 2.0, 1.0, 0).x == 2.0);
    }

    TEST_CASE("Monte Carlo race agrees within its standard error")
    {
        const auto e = monte_carlo_race(0.4, 5, 50000, 3);
        CHECK(std::abs(e.value - race_probability(0.4, 5)) < 4 * e.stderr_value);
        CHECK(monte_carlo_race(0.4, 5, 1000, 3).value == monte_carlo_race(0.4, 5, 1000, 3).value);
    }

    TEST_CASE("sweep tables")
    {
        const auto rows = sweep_alpha(1e-3, {0.1, 0.4, 0.5});
        REQUIRE(rows.size() == 3);
        CHECK(rows[1].ell_star == 118u);
        CHECK_FALSE(rows[2].ell_star.has_value());
        const std::string csv = sweep_csv(rows);
        CHECK(csv.rfind("alpha,ell_star,p_at_ell_star\n", 0) == 0);
        CHECK(csv.find("0.5,unsafe,") != std::string::npos);
        CHECK(sweep_json(1e-3, rows).find("\"ell_star\"") != std::string::npos);
    }
}
