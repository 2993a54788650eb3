// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_LOOKAHEAD_HPP
#define STAKESIM_LOOKAHEAD_HPP

#include <stakesim/chain.hpp>
#include <stakesim/protocol.hpp>

#include <map>
#include <vector>

namespace stakesim {

struct LookaheadLimits {
    Slot horizon{256};
    std::uint32_t k_max{32};
    std::size_t node_budget{4096};
};

/**
 * Earliest slot at which score S(base)+k is reachable, per lead k.
 * Entries are exact for slots up to complete_through; beyond it the search
 * was cut by the horizon or the node budget and a missing k means "not
 * reached by complete_through".
 */
struct LeadMap {
    std::map<std::uint32_t, Slot> first;
    bool exact{true};
    Slot complete_through{0};
    std::size_t nodes{0};

    std::optional<Slot> at(std::uint32_t k) const;
};

/** Self-built chains; path[k] is the chain realizing first[k]. */
struct SelfLeads : LeadMap {
    std::map<std::uint32_t, std::vector<Block>> path;
};

/**
 * Breadth-first expansion of every block self can mine with coins on top of
 * base or its own hypothetical blocks, slots (t, t+horizon]. Blocks built
 * directly on base carry first_payload.
 */
SelfLeads lookahead_self(const BlockSource& source, const Protocol& protocol, ParticipantId self,
                         const std::vector<CoinId>& coins, const BlockId& base, Slot t, const LookaheadLimits& limits,
                         const std::vector<Transfer>& first_payload = {});

/**
 * Same expansion for every coin not owned by self at base, as evaluated by
 * obs. Falls back to cutoff estimates (exact = false) as soon as obs cannot
 * evaluate a needed eligibility. With targets (self's lead map), the search
 * stops once each target k is either past or matched by the rest.
 */
LeadMap lookahead_others(const BlockSource& source, const Protocol& protocol, ParticipantId self, const BlockId& base,
                         Slot t, const LookaheadLimits& limits, const Observer& obs,
                         const std::map<std::uint32_t, Slot>* targets = nullptr);

/**
 * T_k: smallest T with P[rest reaches k blocks within T slots] >= quantile,
 * the rest succeeding independently with probability q per slot.
 */
std::vector<Slot> race_cutoffs(double q, std::uint32_t k_max, double quantile = 0.5, Slot cap = 1u << 20);

//! Per-slot probability that at least one of n coins is eligible on a fixed tip.
double per_slot_rate(double p, std::size_t n);

} // namespace stakesim

#endif // STAKESIM_LOOKAHEAD_HPP
