// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_ANALYSIS_HPP
#define STAKESIM_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stakesim::analysis {

struct RaceQuery {
    double alpha{0};
    std::uint64_t ell{1};
};

/**
 * P[at least ell heads in 2*ell-1 Bernoulli(alpha) flips].
 * Evaluated in log space; throws DomainError outside alpha in [0,1], ell >= 1.
 */
double race_probability(const RaceQuery& q);
inline double race_probability(double alpha, std::uint64_t ell) { return race_probability(RaceQuery{alpha, ell}); }
//! Natural log of race_probability; -inf when the probability is zero.
double log_race_probability(const RaceQuery& q);

/** Smallest ell with race_probability(alpha, ell) < T; none for alpha >= 0.5. */
std::optional<std::uint64_t> min_safe_window(double alpha, double T);

//! failure / blocks.
double lifetime_threshold(std::uint64_t blocks, double failure);

struct UnasBound {
    double multiplier{0};      //!< 2 - 2D/(lambda+1)
    bool defense_required{false}; //!< D < lambda/2
};
UnasBound unas_rate_bound(std::uint64_t D, std::uint64_t lambda);

struct ForkPoint {
    double x{0}; //!< expected attacker subtree size
    double y{0}; //!< expected honest block count
};
ForkPoint exp_fork_trajectory(double alpha, double x0, double y0, std::uint64_t k);

struct Estimate {
    double value{0};
    double stderr_value{0};
    std::uint64_t trials{0};
};

/** Simulated 2*ell-1 flips per trial. */
Estimate monte_carlo_race(double alpha, std::uint64_t ell, std::uint64_t trials, std::uint64_t seed);
/** Sum over all 2^(2*ell-1) outcomes with at least ell heads; ell <= 6. */
double exhaustive_race(double alpha, std::uint64_t ell);

struct SweepRow {
    double alpha{0};
    std::optional<std::uint64_t> ell_star; //!< none: unsafe at any window
    double p_at_ell_star{0};
};

std::vector<SweepRow> sweep_alpha(double T, const std::vector<double>& alphas);
//! Header alpha,ell_star,p_at_ell_star; unsafe rows carry "unsafe".
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(double T, const std::vector<SweepRow>& rows);

} // namespace stakesim::analysis

#endif // STAKESIM_ANALYSIS_HPP
