// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_SCENARIOS_HPP
#define STAKESIM_SCENARIOS_HPP

#include <stakesim/engine.hpp>

namespace stakesim::scenarios {

/** Uniform honest network: miners participants with coins_each coins. */
SimConfig honest(std::uint32_t miners, std::uint32_t coins_each, double p, Slot slots, std::uint64_t seed);

/**
 * One attacker coin running kind ("unas" or "naive-fork") with depth D among
 * lambda-1 honest coins, recency-1 oracle.
 */
SimConfig fork_miner(const std::string& kind, std::uint32_t D, std::uint32_t lambda, double p, Slot slots,
                     std::uint64_t seed);

/** Selfish miner with attacker_coins of total_coins under P1. */
SimConfig selfish(SelfishMode mode, std::uint32_t attacker_coins, std::uint32_t total_coins, double p, Slot slots,
                  Slot horizon, std::uint64_t seed);

/**
 * A single double-spend race of depth z: the attacker stakes attacker_coins
 * against honest_coins and pays a passive vendor with an extra coin.
 */
SimConfig double_spend(std::uint32_t attacker_coins, std::uint32_t honest_coins, double p, std::uint32_t z,
                       std::uint64_t seed);

/** Exponential forking against GHOST miners, one coin each. */
SimConfig ghost_fork(std::uint32_t honest_coins, double p, Slot start_slot, Slot track_slots, const std::string& root,
                     std::uint64_t seed);

} // namespace stakesim::scenarios

#endif // STAKESIM_SCENARIOS_HPP
