// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_ORACLE_CHECK_HPP
#define STAKESIM_ORACLE_CHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace stakesim {

struct OracleCheck {
    std::string name;
    bool pass{false};
    std::string detail;
};

struct OracleCheckOptions {
    std::uint64_t seed{1};
    std::uint64_t trials{100000};        //!< Monte Carlo flips-trials per point
    std::uint64_t engine_trials{300};    //!< double-spend races run through the engine
    std::vector<std::string> corrupt;    //!< test hook: checks whose tolerance is forced negative
};

/** Closed forms against the exhaustive and Monte Carlo oracles and the engine. */
std::vector<OracleCheck> run_oracle_checks(const OracleCheckOptions& options);
std::string oracle_report(const std::vector<OracleCheck>& checks);

} // namespace stakesim

#endif // STAKESIM_ORACLE_CHECK_HPP
