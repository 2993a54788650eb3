// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/chain.hpp>
#include <stakesim/codec.hpp>
#include <stakesim/protocol.hpp>

#include <algorithm>

namespace stakesim {

const Block& BlockSource::at(const BlockId& id) const
{
    const Block* b = find(id);
    if (!b) throw LookupError("unknown block " + id.hex());
    return *b;
}

std::optional<BlockId> BlockSource::predecessor(const BlockId& id, std::uint64_t d) const
{
    if (d > score(id)) return std::nullopt;
    BlockId cur = id;
    for (std::uint64_t i = 0; i < d; ++i) cur = *at(cur).pred;
    return cur;
}

BlockId BlockSource::ancestor_or_genesis(const BlockId& id, std::uint64_t d) const
{
    auto a = predecessor(id, d);
    return a ? *a : genesis();
}

bool BlockSource::is_ancestor(const BlockId& anc, const BlockId& id) const
{
    const std::uint64_t sa = score(anc);
    const std::uint64_t si = score(id);
    if (sa > si) return false;
    return *predecessor(id, si - sa) == anc;
}

ChainStore::ChainStore(std::vector<ParticipantId> allocation)
    : allocation_(std::move(allocation))
{
    if (allocation_.empty()) throw DomainError("genesis allocation must hold at least one coin");
    Entry g;
    g.block = make_genesis(allocation_);
    g.owners = std::make_shared<const std::vector<ParticipantId>>(allocation_);
    genesis_ = g.block.id;
    index_.emplace(genesis_, 0);
    entries_.push_back(std::move(g));
}

const ChainStore::Entry& ChainStore::entry(const BlockId& id) const
{
    auto it = index_.find(id);
    if (it == index_.end()) throw LookupError("unknown block " + id.hex());
    return entries_[it->second];
}

const Block* ChainStore::find(const BlockId& id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &entries_[it->second].block;
}

std::uint64_t ChainStore::score(const BlockId& id) const { return entry(id).score; }

ParticipantId ChainStore::owner_at(const BlockId& id, CoinId c) const
{
    if (c >= allocation_.size()) throw LookupError("unknown coin " + std::to_string(c));
    return (*entry(id).owners)[c];
}

ParticipantId ChainStore::owner_at_replay(const BlockId& id, CoinId c) const
{
    if (c >= allocation_.size()) throw LookupError("unknown coin " + std::to_string(c));
    std::vector<const Block*> path;
    for (const Block* b = &entry(id).block; b; b = b->pred ? &entry(*b->pred).block : nullptr) path.push_back(b);
    ParticipantId owner = allocation_[c];
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        for (const auto& tx : (*it)->payload) {
            if (tx.coin == c) owner = tx.to;
        }
    }
    return owner;
}

const std::vector<BlockId>& ChainStore::children(const BlockId& id) const { return entry(id).children; }

bool ChainStore::insert(const Block& b)
{
    if (index_.count(b.id)) return false;
    if (!b.pred) throw StructuralError("second root block " + b.id.hex());
    auto pit = index_.find(*b.pred);
    if (pit == index_.end()) throw StructuralError("dangling predecessor " + b.pred->hex());
    for (const auto& tx : b.payload) {
        if (tx.coin >= allocation_.size()) throw LookupError("transfer of unknown coin " + std::to_string(tx.coin));
    }
    Entry& parent = entries_[pit->second];
    Entry e;
    e.block = b;
    e.score = parent.score + 1;
    if (b.payload.empty()) {
        e.owners = parent.owners;
    } else {
        auto owners = std::make_shared<std::vector<ParticipantId>>(*parent.owners);
        for (const auto& tx : b.payload) (*owners)[tx.coin] = tx.to;
        e.owners = std::move(owners);
    }
    parent.children.push_back(b.id);
    index_.emplace(b.id, entries_.size());
    entries_.push_back(std::move(e));
    return true;
}

const Block* Overlay::find(const BlockId& id) const
{
    auto it = local_.find(id);
    return it != local_.end() ? &it->second.block : base_->find(id);
}

std::uint64_t Overlay::score(const BlockId& id) const
{
    auto it = local_.find(id);
    return it != local_.end() ? it->second.score : base_->score(id);
}

ParticipantId Overlay::owner_at(const BlockId& id, CoinId c) const
{
    if (c >= coin_count()) throw LookupError("unknown coin " + std::to_string(c));
    std::vector<const Block*> path;
    BlockId cur = id;
    for (auto it = local_.find(cur); it != local_.end(); it = local_.find(cur)) {
        path.push_back(&it->second.block);
        cur = *it->second.block.pred;
    }
    ParticipantId owner = base_->owner_at(cur, c);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        for (const auto& tx : (*it)->payload) {
            if (tx.coin == c) owner = tx.to;
        }
    }
    return owner;
}

void Overlay::add(const Block& b)
{
    if (find(b.id)) return;
    if (!b.pred) throw StructuralError("second root block " + b.id.hex());
    if (!find(*b.pred)) throw StructuralError("dangling predecessor " + b.pred->hex());
    local_.emplace(b.id, Local{b, score(*b.pred) + 1});
}

bool Validator::own_conditions(const Block& b, const Block& pred) const
{
    if (!b.witness) return false;
    const CoinId c = *b.witness;
    if (c >= source_.coin_count()) return false;
    if (!(pred.time < b.time)) return false;
    BlockId cur = pred.id;
    for (std::uint32_t i = 1; i <= protocol_.freeze(); ++i) {
        if (source_.owner_at(cur, c) != b.miner) return false;
        const Block& cb = source_.at(cur);
        if (!cb.pred) break;
        cur = *cb.pred;
    }
    std::vector<std::pair<CoinId, ParticipantId>> moved;
    for (const auto& tx : b.payload) {
        if (tx.coin >= source_.coin_count()) return false;
        ParticipantId owner = source_.owner_at(pred.id, tx.coin);
        for (const auto& [coin, to] : moved) {
            if (coin == tx.coin) owner = to;
        }
        if (owner != tx.from) return false;
        moved.emplace_back(tx.coin, tx.to);
    }
    return protocol_.validate(source_, b);
}

bool Validator::intrinsic(const Block& b)
{
    if (!b.pred) return b.id == source_.genesis();
    if (auto it = memo_.find(b.id); it != memo_.end()) return it->second;

    // Walk up to the first ancestor with a known verdict, then settle downwards.
    std::vector<const Block*> pending{&b};
    bool ok = true;
    for (;;) {
        const Block* top = pending.back();
        const Block* pred = source_.find(*top->pred);
        if (!pred) throw StructuralError("missing ancestor " + top->pred->hex());
        if (!pred->pred) {
            ok = pred->id == source_.genesis();
            break;
        }
        if (auto it = memo_.find(pred->id); it != memo_.end()) {
            ok = it->second;
            break;
        }
        pending.push_back(pred);
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        const Block* cur = *it;
        ok = ok && own_conditions(*cur, source_.at(*cur->pred));
        if (cur->id == compute_block_id(*cur)) {
            memo_[cur->id] = ok;
        } else {
            ok = false; // forged id; never memoize under it
        }
    }
    return ok;
}

bool Validator::is_valid(const Block& b, Slot now)
{
    if (!b.pred) return b.id == source_.genesis();
    return b.time <= now && intrinsic(b);
}

bool Validator::is_valid(const BlockId& id, Slot now) { return is_valid(source_.at(id), now); }

bool is_valid(const BlockSource& source, const Block& b, Slot now, const Protocol& protocol)
{
    Validator v(source, protocol);
    return v.is_valid(b, now);
}

BlockId best_tip(const BlockSource& source, const std::vector<BlockId>& known, Slot now, const Protocol& protocol)
{
    Validator v(source, protocol);
    BlockId best = source.genesis();
    std::uint64_t best_score = 0;
    for (const auto& id : known) {
        const Block& b = source.at(id);
        if (!v.is_valid(b, now)) continue;
        const std::uint64_t s = source.score(id);
        if (prefer(s, id, best_score, best)) {
            best = id;
            best_score = s;
        }
    }
    return best;
}

std::vector<BlockId> chain_to(const BlockSource& source, const BlockId& tip)
{
    std::vector<BlockId> path;
    path.reserve(source.score(tip) + 1);
    std::optional<BlockId> cur = tip;
    while (cur) {
        path.push_back(*cur);
        cur = source.at(*cur).pred;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace stakesim
