// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/analysis.hpp>
#include <stakesim/rng.hpp>
#include <stakesim/types.hpp>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

namespace stakesim::analysis {

namespace {

/** Neumaier-compensated running sum. */
class CompensatedSum {
public:
    void add(long double x)
    {
        const long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const { return sum_ + c_; }

private:
    long double sum_{0};
    long double c_{0};
};

void check_query(const RaceQuery& q)
{
    if (!(q.alpha >= 0.0 && q.alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
    if (q.ell < 1) throw DomainError("race length ell must be at least 1");
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

double log_race_probability(const RaceQuery& q)
{
    check_query(q);
    if (q.alpha == 0.0) return -std::numeric_limits<double>::infinity();
    if (q.alpha == 1.0) return 0.0;

    const long double n = 2.0L * static_cast<long double>(q.ell) - 1.0L;
    const long double la = std::log(static_cast<long double>(q.alpha));
    const long double lb = std::log1p(-static_cast<long double>(q.alpha));
    const long double lg_n = std::lgamma(n + 1.0L);
    auto log_term = [&](long double i) {
        return lg_n - std::lgamma(i + 1.0L) - std::lgamma(n - i + 1.0L) + i * la + (n - i) * lb;
    };

    // Terms rise up to the mode then fall; the first term past the mode that
    // is negligible against the running sum ends the loop.
    const long double mode = std::floor((n + 1.0L) * static_cast<long double>(q.alpha));
    const long double first = static_cast<long double>(q.ell);
    const long double ref = log_term(std::max(first, std::min(mode, n)));
    CompensatedSum sum;
    for (long double i = first; i <= n; i += 1.0L) {
        const long double x = std::exp(log_term(i) - ref);
        sum.add(x);
        if (i > mode && x < 1e-22L * sum.value()) break;
    }
    return static_cast<double>(ref + std::log(sum.value()));
}

double race_probability(const RaceQuery& q)
{
    return std::exp(log_race_probability(q));
}

std::optional<std::uint64_t> min_safe_window(double alpha, double T)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
    if (!(T > 0.0 && T < 1.0)) throw DomainError("tolerance T must lie in (0,1)");
    if (alpha >= 0.5) return std::nullopt;

    const double log_t = std::log(T);
    auto safe = [&](std::uint64_t ell) { return log_race_probability({alpha, ell}) < log_t; };

    std::uint64_t lo = 0; // largest known unsafe window, 0 meaning none
    std::uint64_t hi = 1;
    while (!safe(hi)) {
        lo = hi;
        if (hi > (std::uint64_t{1} << 40)) throw DomainError("safe window exceeds search bound");
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (safe(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double lifetime_threshold(std::uint64_t blocks, double failure)
{
    if (blocks < 1) throw DomainError("lifetime block count must be at least 1");
    return failure / static_cast<double>(blocks);
}

UnasBound unas_rate_bound(std::uint64_t D, std::uint64_t lambda)
{
    if (lambda < 1) throw DomainError("coin count lambda must be at least 1");
    UnasBound b;
    b.multiplier = 2.0 - 2.0 * static_cast<double>(D) / (static_cast<double>(lambda) + 1.0);
    b.defense_required = 2 * D < lambda;
    return b;
}

ForkPoint exp_fork_trajectory(double alpha, double x0, double y0, std::uint64_t k)
{
    const double kd = static_cast<double>(k);
    return {std::pow(1.0 + alpha, kd) * x0, y0 + (1.0 - alpha) * kd};
}

Estimate monte_carlo_race(double alpha, std::uint64_t ell, std::uint64_t trials, std::uint64_t seed)
{
    check_query({alpha, ell});
    if (trials < 1) throw DomainError("trial count must be at least 1");
    Rng rng(seed);
    const std::uint64_t n = 2 * ell - 1;
    std::uint64_t wins = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::uint64_t heads = 0;
        for (std::uint64_t i = 0; i < n; ++i) heads += rng.bernoulli(alpha) ? 1 : 0;
        wins += heads >= ell ? 1 : 0;
    }
    Estimate e;
    e.trials = trials;
    e.value = static_cast<double>(wins) / static_cast<double>(trials);
    e.stderr_value = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
    return e;
}

double exhaustive_race(double alpha, std::uint64_t ell)
{
    check_query({alpha, ell});
    if (ell > 6) throw DomainError("exhaustive enumeration supports ell <= 6");
    const unsigned n = static_cast<unsigned>(2 * ell - 1);
    CompensatedSum sum;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const unsigned heads = static_cast<unsigned>(std::popcount(mask));
        if (heads < ell) continue;
        long double w = 1.0L;
        for (unsigned i = 0; i < n; ++i) w *= (mask >> i & 1u) ? alpha : 1.0L - alpha;
        sum.add(w);
    }
    return static_cast<double>(sum.value());
}

std::vector<SweepRow> sweep_alpha(double T, const std::vector<double>& alphas)
{
    std::vector<SweepRow> rows;
    rows.reserve(alphas.size());
    for (double a : alphas) {
        SweepRow r;
        r.alpha = a;
        r.ell_star = min_safe_window(a, T);
        if (r.ell_star) r.p_at_ell_star = race_probability(a, *r.ell_star);
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "alpha,ell_star,p_at_ell_star\n";
    for (const auto& r : rows) {
        out += fmt("%.10g", r.alpha);
        if (r.ell_star) {
            out += "," + std::to_string(*r.ell_star) + "," + fmt("%.17g", r.p_at_ell_star) + "\n";
        } else {
            out += ",unsafe,\n";
        }
    }
    return out;
}

std::string sweep_json(double T, const std::vector<SweepRow>& rows)
{
    nlohmann::json doc;
    doc["schema"] = "stakesim.sweep/1";
    doc["threshold"] = T;
    auto& arr = doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["alpha"] = r.alpha;
        row["safe"] = r.ell_star.has_value();
        row["ell_star"] = r.ell_star ? nlohmann::json(*r.ell_star) : nlohmann::json(nullptr);
        row["p_at_ell_star"] = r.ell_star ? nlohmann::json(r.p_at_ell_star) : nlohmann::json(nullptr);
        arr.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

} // namespace stakesim::analysis
