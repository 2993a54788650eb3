// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/lookahead.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace stakesim {

namespace {

struct Node {
    BlockId id;
    std::uint32_t depth;
    std::int64_t parent;
};

constexpr Slot kNever = std::numeric_limits<Slot>::max();

// Every target k is settled: either its slot has passed or the rest reached k.
bool decided(const std::map<std::uint32_t, Slot>& targets, std::uint32_t deepest, Slot s)
{
    for (const auto& [k, when] : targets) {
        if (when > s && deepest < k) return false;
    }
    return true;
}

} // namespace

std::optional<Slot> LeadMap::at(std::uint32_t k) const
{
    auto it = first.find(k);
    if (it == first.end()) return std::nullopt;
    return it->second;
}

SelfLeads lookahead_self(const BlockSource& source, const Protocol& protocol, ParticipantId self,
                         const std::vector<CoinId>& coins, const BlockId& base, Slot t, const LookaheadLimits& limits,
                         const std::vector<Transfer>& first_payload)
{
    SelfLeads r;
    r.complete_through = t;
    if (limits.horizon == 0) return r;

    std::vector<CoinId> owned;
    for (CoinId c : coins) {
        if (c < source.coin_count() && source.owner_at(base, c) == self) owned.push_back(c);
    }
    if (owned.empty()) {
        r.complete_through = t + limits.horizon;
        return r;
    }

    Overlay ov(source);
    std::vector<Node> nodes{{base, 0, -1}};
    const Observer obs = Observer::verifier();
    std::uint32_t deepest = 0;
    for (Slot s = t + 1; s <= t + limits.horizon; ++s) {
        const std::size_t n = nodes.size();
        bool over_budget = false;
        for (std::size_t i = 0; i < n && !over_budget; ++i) {
            const Block& tip = ov.at(nodes[i].id);
            for (CoinId c : owned) {
                auto e = protocol.eligible(ov, tip, c, s, self, obs);
                if (!e || !*e) continue;
                auto b = protocol.mine(ov, nodes[i].id, c, s, self, nodes[i].depth == 0 ? first_payload : std::vector<Transfer>{});
                if (!b) continue;
                ov.add(*b);
                const std::uint32_t depth = nodes[i].depth + 1;
                nodes.push_back({b->id, depth, static_cast<std::int64_t>(i)});
                if (!r.first.count(depth)) {
                    r.first[depth] = s;
                    std::vector<Block> path;
                    for (std::int64_t j = static_cast<std::int64_t>(nodes.size()) - 1; j > 0; j = nodes[j].parent) {
                        path.push_back(ov.at(nodes[j].id));
                    }
                    std::reverse(path.begin(), path.end());
                    r.path[depth] = std::move(path);
                }
                deepest = std::max(deepest, depth);
                if (nodes.size() > limits.node_budget) {
                    over_budget = true;
                    break;
                }
            }
        }
        r.nodes = nodes.size();
        if (over_budget) {
            r.complete_through = s - 1;
            return r;
        }
        r.complete_through = s;
        if (deepest >= limits.k_max) break;
    }
    return r;
}

LeadMap lookahead_others(const BlockSource& source, const Protocol& protocol, ParticipantId self, const BlockId& base,
                         Slot t, const LookaheadLimits& limits, const Observer& obs,
                         const std::map<std::uint32_t, Slot>* targets)
{
    LeadMap r;
    r.complete_through = t;
    if (limits.horizon == 0) return r;

    std::vector<std::pair<CoinId, ParticipantId>> rest;
    for (CoinId c = 0; c < source.coin_count(); ++c) {
        const ParticipantId o = source.owner_at(base, c);
        if (o != self) rest.emplace_back(c, o);
    }
    Slot end = t + limits.horizon;
    if (targets) end = std::min(end, targets->empty() ? t : targets->rbegin()->second);
    if (rest.empty()) {
        r.complete_through = end;
        return r;
    }

    auto statistical = [&] {
        LeadMap est;
        est.exact = false;
        est.complete_through = t + limits.horizon;
        const auto cut = race_cutoffs(per_slot_rate(protocol.success_prob(), rest.size()), limits.k_max);
        for (std::uint32_t k = 1; k <= cut.size(); ++k) {
            if (cut[k - 1] != kNever) est.first[k] = t + cut[k - 1];
        }
        return est;
    };

    Overlay ov(source);
    std::vector<Node> nodes{{base, 0, -1}};
    std::uint32_t deepest = 0;
    for (Slot s = t + 1; s <= end; ++s) {
        const std::size_t n = nodes.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Block& tip = ov.at(nodes[i].id);
            for (const auto& [c, owner] : rest) {
                auto e = protocol.eligible(ov, tip, c, s, owner, obs);
                if (!e) return statistical();
                if (!*e) continue;
                auto b = protocol.mine(ov, nodes[i].id, c, s, owner);
                if (!b) continue;
                ov.add(*b);
                const std::uint32_t depth = nodes[i].depth + 1;
                nodes.push_back({b->id, depth, static_cast<std::int64_t>(i)});
                if (!r.first.count(depth)) r.first[depth] = s;
                deepest = std::max(deepest, depth);
                if (nodes.size() > limits.node_budget) {
                    r.nodes = nodes.size();
                    r.complete_through = s - 1;
                    return r;
                }
            }
        }
        r.nodes = nodes.size();
        r.complete_through = s;
        if (deepest >= limits.k_max) break;
        if (targets && decided(*targets, deepest, s)) break;
    }
    return r;
}

std::vector<Slot> race_cutoffs(double q, std::uint32_t k_max, double quantile, Slot cap)
{
    std::vector<Slot> cut(k_max, kNever);
    if (k_max == 0 || !(q > 0.0)) return cut;
    // dist[j]: probability of exactly j successes so far, j < k_max.
    std::vector<double> dist(k_max, 0.0);
    dist[0] = 1.0;
    std::uint32_t assigned = 0;
    for (Slot T = 1; T <= cap && assigned < k_max; ++T) {
        for (std::uint32_t j = k_max; j-- > 0;) {
            dist[j] = dist[j] * (1.0 - q) + (j > 0 ? dist[j - 1] * q : 0.0);
        }
        double below = 0.0; // P[fewer than k successes]
        for (std::uint32_t k = 1; k <= k_max; ++k) {
            below += dist[k - 1];
            if (cut[k - 1] == kNever && 1.0 - below >= quantile) {
                cut[k - 1] = T;
                ++assigned;
            }
        }
    }
    return cut;
}

double per_slot_rate(double p, std::size_t n)
{
    if (p >= 1.0) return n > 0 ? 1.0 : 0.0;
    return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

} // namespace stakesim
