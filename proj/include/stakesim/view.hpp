// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_VIEW_HPP
#define STAKESIM_VIEW_HPP

#include <stakesim/chain.hpp>

#include <map>
#include <set>
#include <unordered_map>
#include <vector>

namespace stakesim {

/** W(B): blocks in the subtree rooted at B, inclusive. */
struct GhostWeights {
    std::unordered_map<BlockId, std::uint64_t, BlockIdHash> subtree_size;

    std::uint64_t weight(const BlockId& id) const;
    //! Account for a newly stored block; walks to genesis.
    void add(const BlockSource& source, const BlockId& id);
};

/**
 * GHOST: from genesis, descend to the child of maximum W (ties by smallest
 * id) until a leaf. Children outside known are ignored.
 */
BlockId ghost_fork_choice(const ChainStore& store, const GhostWeights& weights,
                          const std::set<BlockId>* known = nullptr);

/**
 * Incremental summary of the published blocks in a store, all assumed valid.
 * Tracks the longest-chain tip, the leaves and, on demand, GHOST weights.
 */
class ViewIndex {
public:
    ViewIndex(const ChainStore& store, bool track_ghost);

    //! Call after each store insertion, in insertion order.
    void on_insert(const BlockId& id);

    const ChainStore& store() const { return *store_; }
    const BlockId& best() const { return best_; }
    std::uint64_t best_score() const { return best_score_; }
    //! Blocks stored with exactly this score.
    std::uint64_t count_at_score(std::uint64_t score) const;
    bool ghost_enabled() const { return track_ghost_; }
    const GhostWeights& ghost() const { return ghost_; }
    BlockId ghost_head() const;

    /** Best block that is not root or a descendant of root. */
    std::optional<BlockId> best_outside(const BlockId& root) const;

private:
    struct TipOrder {
        bool operator()(const std::pair<std::uint64_t, BlockId>& a, const std::pair<std::uint64_t, BlockId>& b) const
        {
            return prefer(a.first, a.second, b.first, b.second);
        }
    };

    const ChainStore* store_;
    bool track_ghost_;
    BlockId best_;
    std::uint64_t best_score_{0};
    std::set<std::pair<std::uint64_t, BlockId>, TipOrder> tips_;
    std::vector<std::uint64_t> per_score_;
    GhostWeights ghost_;
};

} // namespace stakesim

#endif // STAKESIM_VIEW_HPP
