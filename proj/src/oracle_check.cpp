// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/oracle_check.hpp>

#include <stakesim/analysis.hpp>
#include <stakesim/rng.hpp>
#include <stakesim/scenarios.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stakesim {

namespace {

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

class Suite {
public:
    explicit Suite(const OracleCheckOptions& o) : opts_(o) {}

    double tolerance(const std::string& name, double tol) const
    {
        return std::find(opts_.corrupt.begin(), opts_.corrupt.end(), name) != opts_.corrupt.end() ? -1.0 : tol;
    }

    void add(const std::string& name, double error, double tol, const std::string& what)
    {
        const double t = tolerance(name, tol);
        out_.push_back({name, error <= t, what + ": error " + fmt(error) + ", tolerance " + fmt(t)});
    }

    std::vector<OracleCheck> take() { return std::move(out_); }

private:
    const OracleCheckOptions& opts_;
    std::vector<OracleCheck> out_;
};

} // namespace

std::vector<OracleCheck> run_oracle_checks(const OracleCheckOptions& o)
{
    using namespace analysis;
    Suite s(o);
    const double alphas[] = {0.1, 0.25, 1.0 / 3.0, 0.4, 0.49};

    double err = 0.0;
    for (std::uint64_t ell = 1; ell <= 6; ++ell) {
        for (double a : alphas) err = std::max(err, std::fabs(race_probability(a, ell) - exhaustive_race(a, ell)));
    }
    s.add("exhaustive-race", err, 1e-12, "closed form vs enumeration, ell <= 6");

    err = 0.0;
    for (std::uint64_t ell = 1; ell <= 1000; ++ell) err = std::max(err, std::fabs(race_probability(0.5, ell) - 0.5));
    s.add("symmetry", err, 1e-12, "race(0.5, ell) for ell in [1, 1000]");

    err = 0.0;
    for (double a = 0.05; a < 0.5; a += 0.05) {
        for (std::uint64_t ell : {1, 2, 5, 10, 50, 100}) {
            err = std::max(err, std::fabs(race_probability(a, ell) + race_probability(1.0 - a, ell) - 1.0));
        }
    }
    s.add("complement", err, 1e-12, "race(a, ell) + race(1-a, ell) = 1");

    // Violations counted as errors of size one.
    double violations = 0.0;
    for (std::uint64_t ell : {1, 2, 3, 10, 40}) {
        double prev = -1.0;
        for (int i = 1; i < 50; ++i) {
            const double p = race_probability(i / 100.0, ell);
            if (!(p > prev)) violations += 1.0;
            prev = p;
        }
    }
    for (double a : {0.1, 0.3, 0.45}) {
        for (std::uint64_t ell = 1; ell < 60; ++ell) {
            if (!(race_probability(a, ell + 1) < race_probability(a, ell))) violations += 1.0;
        }
    }
    s.add("monotonicity", violations, 0.0, "strict in alpha and in ell");

    const std::pair<double, std::uint64_t> points[] = {{0.3, 2}, {0.4, 3}, {0.45, 5}};
    std::uint64_t stream = 0;
    for (auto [a, ell] : points) {
        const auto est = monte_carlo_race(a, ell, o.trials, derive_seed(o.seed, 100 + stream++));
        const double z = std::fabs(est.value - race_probability(a, ell)) / std::max(est.stderr_value, 1e-300);
        s.add("monte-carlo-race", z, 3.0,
              "alpha " + fmt(a) + ", ell " + std::to_string(ell) + ", |estimate - closed form| in standard errors");
    }

    s.add("lifetime-threshold", std::fabs(lifetime_threshold(500'000'000, 1e-7) - 2e-16), 0.0, "5e8 blocks, 1e-7");

    {
        const auto log = run(scenarios::honest(4, 5, 0.01, 2000, derive_seed(o.seed, 200)));
        s.add("engine-honest-detector", static_cast<double>(log.deviations.size()), 0.0,
              "evidence in an all-honest run");
    }

    {
        std::uint64_t wins = 0;
        const std::uint64_t n = std::max<std::uint64_t>(o.engine_trials, 1);
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto log = run(scenarios::double_spend(2, 3, 0.01, 2, derive_seed(o.seed, 300 + i)));
            wins += metrics(log).double_spend_successes;
        }
        const double p = race_probability(0.4, 2);
        const double freq = static_cast<double>(wins) / static_cast<double>(n);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        s.add("engine-double-spend", std::fabs(freq - p) / se, 3.0,
              "alpha 0.4, z 2, " + std::to_string(n) + " races, frequency " + fmt(freq) + " vs " + fmt(p) +
                  " in standard errors");
    }
    return s.take();
}

std::string oracle_report(const std::vector<OracleCheck>& checks)
{
    std::string out;
    std::size_t failed = 0;
    for (const auto& c : checks) {
        out += (c.pass ? "PASS " : "FAIL ") + c.name + " " + c.detail + "\n";
        failed += !c.pass;
    }
    out += "oracle-check: " + std::to_string(checks.size() - failed) + " passed, " + std::to_string(failed) +
           " failed\n";
    return out;
}

} // namespace stakesim
