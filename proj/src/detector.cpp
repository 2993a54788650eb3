// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/engine.hpp>

#include <algorithm>

namespace stakesim {

std::string to_string(DeviationKind kind)
{
    return kind == DeviationKind::SameSlot ? "same-slot" : "regressive-predecessor";
}

std::vector<DeviationEvidence> Detector::observe(const Announcement& a)
{
    const Block& b = a.block;
    std::vector<DeviationEvidence> found;
    if (!b.witness || !b.pred) return found; // genesis is never announced by a coin
    const CoinId c = *b.witness;
    const Seen cur{b.id, b.time, source_->score(b.id), source_->score(*b.pred)};
    CoinLog& log = coins_[c];

    if (!log.blocks.empty() && cur.time > log.max_time) {
        // Every earlier block is strictly older: only the regressive clause can fire.
        if (log.max_score > cur.pred_score) {
            for (const auto& prev : log.blocks) {
                if (prev.score > cur.pred_score) {
                    found.push_back({c, prev.id, cur.id, DeviationKind::RegressivePredecessor});
                }
            }
        }
    } else {
        for (const auto& prev : log.blocks) {
            if (prev.id == cur.id) continue;
            if (prev.time == cur.time) {
                found.push_back({c, prev.id, cur.id, DeviationKind::SameSlot});
            } else if (cur.time > prev.time && prev.score > cur.pred_score) {
                found.push_back({c, prev.id, cur.id, DeviationKind::RegressivePredecessor});
            } else if (prev.time > cur.time && cur.score > prev.pred_score) {
                found.push_back({c, cur.id, prev.id, DeviationKind::RegressivePredecessor});
            }
        }
    }

    log.blocks.push_back(cur);
    log.max_time = std::max(log.max_time, cur.time);
    log.max_score = std::max(log.max_score, cur.score);
    evidence_.insert(evidence_.end(), found.begin(), found.end());
    return found;
}

std::vector<DeviationEvidence> detect(const BlockSource& source, const std::vector<Announcement>& announcements)
{
    Detector d(source);
    for (const auto& a : announcements) d.observe(a);
    return d.evidence();
}

HonestExplanation honest_explanation(const BlockSource& source, const std::vector<Announcement>& announcements)
{
    HonestExplanation out;
    std::vector<const Block*> blocks;
    for (const auto& a : announcements) {
        if (a.block.pred) blocks.push_back(&a.block);
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block* x, const Block* y) { return x->time < y->time; });
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i]->time == blocks[i - 1]->time) return out;
    }

    // S_i holds B_j and Pred(B_j) for j < i, plus Pred(B_i); Pred(B_i) must be its best.
    std::vector<BlockId> aware;
    std::uint64_t max_own = 0;
    bool any = false;
    for (const Block* b : blocks) {
        const std::uint64_t pred_score = source.score(*b->pred);
        if (any && max_own > pred_score) return out;
        aware.push_back(*b->pred);
        out.order.push_back(b->id);
        out.awareness.push_back(aware);
        aware.push_back(b->id);
        max_own = std::max(max_own, pred_score + 1);
        any = true;
    }
    out.possible = true;
    return out;
}

} // namespace stakesim
