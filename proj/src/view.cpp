// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/view.hpp>

namespace stakesim {

std::uint64_t GhostWeights::weight(const BlockId& id) const
{
    auto it = subtree_size.find(id);
    return it == subtree_size.end() ? 0 : it->second;
}

void GhostWeights::add(const BlockSource& source, const BlockId& id)
{
    std::optional<BlockId> cur = id;
    while (cur) {
        ++subtree_size[*cur];
        cur = source.at(*cur).pred;
    }
}

BlockId ghost_fork_choice(const ChainStore& store, const GhostWeights& weights, const std::set<BlockId>* known)
{
    BlockId cur = store.genesis();
    for (;;) {
        const BlockId* next = nullptr;
        std::uint64_t best_w = 0;
        for (const auto& child : store.children(cur)) {
            if (known && !known->count(child)) continue;
            const std::uint64_t w = weights.weight(child);
            if (!next || w > best_w || (w == best_w && child < *next)) {
                next = &child;
                best_w = w;
            }
        }
        if (!next) return cur;
        cur = *next;
    }
}

ViewIndex::ViewIndex(const ChainStore& store, bool track_ghost)
    : store_(&store), track_ghost_(track_ghost), best_(store.genesis())
{
    for (std::size_t i = 0; i < store.size(); ++i) on_insert(store.block_at(i).id);
}

void ViewIndex::on_insert(const BlockId& id)
{
    const Block& b = store_->at(id);
    const std::uint64_t s = store_->score(id);
    if (b.pred) tips_.erase({s - 1, *b.pred});
    if (store_->children(id).empty()) tips_.insert({s, id});
    if (per_score_.size() <= s) per_score_.resize(s + 1, 0);
    ++per_score_[s];
    if (prefer(s, id, best_score_, best_)) {
        best_ = id;
        best_score_ = s;
    }
    if (track_ghost_) ghost_.add(*store_, id);
}

std::uint64_t ViewIndex::count_at_score(std::uint64_t score) const
{
    return score < per_score_.size() ? per_score_[score] : 0;
}

BlockId ViewIndex::ghost_head() const { return ghost_fork_choice(*store_, ghost_); }

std::optional<BlockId> ViewIndex::best_outside(const BlockId& root) const
{
    // The preferred element of an ancestor-closed set is one of its leaves:
    // either a global leaf or the parent of root.
    std::optional<std::pair<std::uint64_t, BlockId>> best;
    if (auto parent = store_->predecessor(root, 1)) best.emplace(store_->score(*parent), *parent);
    for (const auto& [score, id] : tips_) {
        if (best && !prefer(score, id, best->first, best->second)) break;
        if (!store_->is_ancestor(root, id)) {
            best.emplace(score, id);
            break;
        }
    }
    if (!best) return std::nullopt;
    return best->second;
}

} // namespace stakesim
