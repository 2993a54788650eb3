// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_CHAIN_HPP
#define STAKESIM_CHAIN_HPP

#include <stakesim/types.hpp>

#include <deque>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace stakesim {

class Protocol;

/**
 * Read access to a set of blocks closed under predecessor.
 *
 * Implemented by the append-only ChainStore and by Overlay, which layers
 * private or hypothetical blocks over a store without mutating it.
 */
class BlockSource {
public:
    virtual ~BlockSource() = default;

    //! nullptr when unknown.
    virtual const Block* find(const BlockId& id) const = 0;
    virtual std::uint64_t score(const BlockId& id) const = 0;
    virtual ParticipantId owner_at(const BlockId& id, CoinId c) const = 0;
    virtual const BlockId& genesis() const = 0;
    virtual std::size_t coin_count() const = 0;

    bool contains(const BlockId& id) const { return find(id) != nullptr; }
    const Block& at(const BlockId& id) const;
    //! d-th ancestor; none when the chain to genesis is shorter than d.
    std::optional<BlockId> predecessor(const BlockId& id, std::uint64_t d) const;
    //! (d)-th ancestor clamped at genesis.
    BlockId ancestor_or_genesis(const BlockId& id, std::uint64_t d) const;
    //! True when anc lies on the path from id to genesis (inclusive of id).
    bool is_ancestor(const BlockId& anc, const BlockId& id) const;
};

/** Append-only block DAG rooted at genesis with memoized ledger and score. */
class ChainStore final : public BlockSource {
public:
    //! allocation[c] is the genesis owner of coin c.
    explicit ChainStore(std::vector<ParticipantId> allocation);

    ChainStore(const ChainStore&) = delete;
    ChainStore& operator=(const ChainStore&) = delete;

    const Block* find(const BlockId& id) const override;
    std::uint64_t score(const BlockId& id) const override;
    ParticipantId owner_at(const BlockId& id, CoinId c) const override;
    const BlockId& genesis() const override { return genesis_; }
    std::size_t coin_count() const override { return allocation_.size(); }

    /**
     * Append a block whose predecessor is already stored.
     * Returns false when an identical block is present.
     * Throws StructuralError for a dangling predecessor or a non-genesis root.
     */
    bool insert(const Block& b);

    //! Ledger replay from genesis without the memo.
    ParticipantId owner_at_replay(const BlockId& id, CoinId c) const;

    const std::vector<ParticipantId>& allocation() const { return allocation_; }
    const std::vector<BlockId>& children(const BlockId& id) const;
    std::size_t size() const { return entries_.size(); }
    //! Blocks in insertion order.
    const Block& block_at(std::size_t index) const { return entries_[index].block; }

private:
    struct Entry {
        Block block;
        std::uint64_t score{0};
        std::vector<BlockId> children;
        std::shared_ptr<const std::vector<ParticipantId>> owners;
    };

    const Entry& entry(const BlockId& id) const;

    std::vector<ParticipantId> allocation_;
    BlockId genesis_;
    std::deque<Entry> entries_;
    std::unordered_map<BlockId, std::size_t, BlockIdHash> index_;
};

/**
 * Blocks layered over a base source. The base must outlive the overlay and
 * must not lose blocks; new base blocks are visible through the overlay.
 */
class Overlay final : public BlockSource {
public:
    explicit Overlay(const BlockSource& base) : base_(&base) {}

    const Block* find(const BlockId& id) const override;
    std::uint64_t score(const BlockId& id) const override;
    ParticipantId owner_at(const BlockId& id, CoinId c) const override;
    const BlockId& genesis() const override { return base_->genesis(); }
    std::size_t coin_count() const override { return base_->coin_count(); }

    //! Predecessor must be resolvable through the overlay.
    void add(const Block& b);
    bool holds_locally(const BlockId& id) const { return local_.count(id) != 0; }
    void clear() { local_.clear(); }

private:
    struct Local {
        Block block;
        std::uint64_t score;
    };
    const BlockSource* base_;
    std::unordered_map<BlockId, Local, BlockIdHash> local_;
};

/**
 * Validity with a memo of the time-independent part.
 *
 * A block is valid at now iff its intrinsic conditions hold and t_B <= now,
 * since t_Pred < t_B makes the predecessor's time check follow.
 */
class Validator {
public:
    Validator(const BlockSource& source, const Protocol& protocol) : source_(source), protocol_(protocol) {}

    bool is_valid(const Block& b, Slot now);
    bool is_valid(const BlockId& id, Slot now);
    //! Everything except the t_B <= now bound.
    bool intrinsic(const Block& b);

private:
    bool own_conditions(const Block& b, const Block& pred) const;

    const BlockSource& source_;
    const Protocol& protocol_;
    std::unordered_map<BlockId, bool, BlockIdHash> memo_;
};

//! Full recursive check without memo reuse across calls.
bool is_valid(const BlockSource& source, const Block& b, Slot now, const Protocol& protocol);

/** Valid block of maximum score among known; ties go to the smallest id. */
BlockId best_tip(const BlockSource& source, const std::vector<BlockId>& known, Slot now, const Protocol& protocol);

//! (score desc, id asc): true when a is preferred over b.
inline bool prefer(std::uint64_t score_a, const BlockId& a, std::uint64_t score_b, const BlockId& b)
{
    return score_a != score_b ? score_a > score_b : a < b;
}

//! Path from genesis to tip inclusive.
std::vector<BlockId> chain_to(const BlockSource& source, const BlockId& tip);

} // namespace stakesim

#endif // STAKESIM_CHAIN_HPP
