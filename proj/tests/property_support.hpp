// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_TESTS_PROPERTY_SUPPORT_HPP
#define STAKESIM_TESTS_PROPERTY_SUPPORT_HPP

#include <stakesim/chain.hpp>
#include <stakesim/codec.hpp>
#include <stakesim/protocol.hpp>
#include <stakesim/rng.hpp>

#include <memory>
#include <string>
#include <vector>

namespace stakesim::testing {

/** A randomized store mixing mined blocks with hand-built invalid ones. */
struct Case {
    std::unique_ptr<Protocol> protocol;
    std::unique_ptr<ChainStore> store;
    std::vector<ParticipantId> allocation;
    std::vector<BlockId> order; //!< insertion order, genesis first
    std::vector<BlockId> mined; //!< genesis and M_P output on earlier mined blocks
    ParticipantId participants{0};
    std::string label;
};

inline std::unique_ptr<Protocol> random_protocol(Rng& rng, std::uint64_t key_seed, std::string& label)
{
    const double p = 0.3 + 0.6 * rng.uniform();
    const auto freeze = static_cast<std::uint32_t>(1 + rng.below(2));
    switch (rng.below(4)) {
    case 0: {
        const auto ell = static_cast<std::uint32_t>(1 + rng.below(3));
        label = "oracle/" + std::to_string(ell);
        return make_random_oracle(p, ell, key_seed, freeze);
    }
    case 1:
        label = "p1";
        return make_p1(p, key_seed, freeze);
    case 2:
        label = "p2";
        return make_p2(p, key_seed, freeze);
    default:
        label = "p3";
        return make_p3(p, key_seed, freeze);
    }
}

//! Aux bytes a valid block by miner on tip at t must carry.
inline std::vector<std::uint8_t> expected_aux(const Protocol& protocol, const Block& tip, Slot t, ParticipantId miner)
{
    const auto* ex = dynamic_cast<const ExampleProtocol*>(&protocol);
    if (!ex || ex->kind() != ExampleKind::P3) return {};
    std::vector<std::uint8_t> aux;
    put_u64(aux, ex->signature(tip, t, miner));
    return aux;
}

inline Case make_case(std::uint64_t seed, std::size_t max_blocks = 200)
{
    Rng rng(seed);
    Case k;
    k.protocol = random_protocol(rng, derive_seed(seed, 7), k.label);
    const auto coins = 2 + rng.below(5);
    k.participants = static_cast<ParticipantId>(2 + rng.below(3));
    for (std::uint64_t c = 0; c < coins; ++c) k.allocation.push_back(static_cast<ParticipantId>(rng.below(k.participants)));
    k.store = std::make_unique<ChainStore>(k.allocation);
    k.order.push_back(k.store->genesis());
    k.mined.push_back(k.store->genesis());

    const auto target = 1 + rng.below(max_blocks);
    std::size_t attempts = 0;
    while (k.store->size() < target + 1 && attempts++ < target * 20) {
        // Mostly extend mined blocks so valid chains grow deep.
        const bool on_mined = rng.below(10) < 7;
        const BlockId tip = on_mined ? k.mined[rng.below(k.mined.size())] : k.order[rng.below(k.order.size())];
        const Block& tb = k.store->at(tip);
        const auto c = static_cast<CoinId>(rng.below(coins));
        const Slot t = tb.time + 1 + rng.below(3);
        const ParticipantId owner = k.store->owner_at(tip, c);
        std::vector<Transfer> payload;
        if (rng.below(4) == 0) {
            const auto moved = static_cast<CoinId>(rng.below(coins));
            payload.push_back({moved, k.store->owner_at(tip, moved), static_cast<ParticipantId>(rng.below(k.participants))});
        }
        Block b;
        bool from_mine = false;
        switch (rng.below(9)) {
        case 0: // wrong miner
            b = make_block(tip, (owner + 1) % k.participants, t, c, payload, expected_aux(*k.protocol, tb, t, (owner + 1) % k.participants));
            break;
        case 1: // timestamp not after the predecessor
            b = make_block(tip, owner, tb.time, c, payload, expected_aux(*k.protocol, tb, tb.time, owner));
            break;
        case 2: // eligibility ignored
            b = make_block(tip, owner, t, c, payload, expected_aux(*k.protocol, tb, t, owner));
            break;
        case 3: { // payload signed by a non-owner
            const auto moved = static_cast<CoinId>(rng.below(coins));
            const ParticipantId wrong = (k.store->owner_at(tip, moved) + 1) % k.participants;
            b = make_block(tip, owner, t, c, {{moved, wrong, owner}}, expected_aux(*k.protocol, tb, t, owner));
            break;
        }
        case 4: // forged id over otherwise valid contents
            if (auto m = k.protocol->mine(*k.store, tip, c, t, owner, payload)) {
                b = std::move(*m);
                b.id.bytes[31] ^= 0x5a;
                break;
            }
            continue;
        default: {
            try {
                auto m = k.protocol->mine(*k.store, tip, c, t, owner, payload);
                if (!m) continue;
                b = std::move(*m);
                from_mine = on_mined;
            } catch (const DomainError&) {
                continue;
            }
        }
        }
        if (k.store->insert(b)) {
            k.order.push_back(b.id);
            if (from_mine) k.mined.push_back(b.id);
        }
    }
    return k;
}

/** Independent forward pass: settle validity from genesis down to id. */
inline bool forward_valid(const ChainStore& store, const Protocol& protocol, const BlockId& id, Slot now)
{
    const auto path = chain_to(store, id);
    bool ok = true;
    for (std::size_t i = 1; i < path.size() && ok; ++i) {
        const Block& b = store.at(path[i]);
        const Block& pred = store.at(path[i - 1]);
        ok = b.witness && *b.witness < store.coin_count() && pred.time < b.time && b.id == compute_block_id(b);
        if (!ok) break;
        BlockId cur = pred.id;
        for (std::uint32_t f = 0; f < protocol.freeze() && ok; ++f) {
            ok = store.owner_at_replay(cur, *b.witness) == b.miner;
            const Block& cb = store.at(cur);
            if (!cb.pred) break;
            cur = *cb.pred;
        }
        std::vector<ParticipantId> owners;
        for (CoinId c = 0; c < store.coin_count(); ++c) owners.push_back(store.owner_at_replay(pred.id, c));
        for (const auto& tx : b.payload) {
            if (!ok) break;
            ok = tx.coin < owners.size() && owners[tx.coin] == tx.from;
            if (ok) owners[tx.coin] = tx.to;
        }
        ok = ok && protocol.validate(store, b);
    }
    return ok && store.at(id).time <= now;
}

struct PropertyFailure {
    std::string property;
    std::string detail;
};

/**
 * Checks chain dependence, monotonicity, score, owner memo against replay,
 * recursion against the forward pass, and M_P/V_P coherence on one case.
 */
inline std::vector<PropertyFailure> check_case(std::uint64_t seed, std::size_t max_blocks = 200)
{
    std::vector<PropertyFailure> fails;
    Case k = make_case(seed, max_blocks);
    Rng rng(derive_seed(seed, 99));
    const ChainStore& store = *k.store;
    auto fail = [&](const std::string& prop, const std::string& what) {
        fails.push_back({prop, k.label + " seed " + std::to_string(seed) + ": " + what});
    };

    Validator full(store, *k.protocol);
    for (std::size_t i = 1; i < k.order.size(); ++i) {
        const BlockId& id = k.order[i];
        const Block& b = store.at(id);
        if (store.score(id) != store.score(*b.pred) + 1) fail("score", "score(b) != score(pred)+1 at " + id.hex());
        const CoinId c = static_cast<CoinId>(rng.below(store.coin_count()));
        if (store.owner_at(id, c) != store.owner_at_replay(id, c)) fail("owner-memo", "memo differs from replay");
    }

    // A few blocks per case get the expensive checks.
    for (int probe = 0; probe < 3 && k.order.size() > 1; ++probe) {
        const auto& pool = probe % 2 == 0 && k.mined.size() > 1 ? k.mined : k.order;
        const BlockId id = pool[1 + rng.below(pool.size() - 1)];
        const Block& b = store.at(id);
        const Slot now = b.time + rng.below(3);
        const bool v = full.is_valid(b, now);

        if (v != forward_valid(store, *k.protocol, id, now)) fail("forward-pass", "recursive and forward checks differ");

        // Chain dependence and monotonicity: the bare ancestor chain decides alike.
        ChainStore bare(k.allocation);
        for (const auto& a : chain_to(store, id)) {
            if (a != store.genesis()) bare.insert(store.at(a));
        }
        Validator small(bare, *k.protocol);
        if (small.is_valid(b, now) != v) fail("chain-dependence", "unrelated blocks changed validity");
        if (v && !full.is_valid(b, now + 1 + rng.below(50))) fail("monotonicity", "valid block became invalid later");
        if (!full.is_valid(b, b.time) && full.is_valid(b, b.time + 10)) fail("monotonicity", "validity depends on now");
    }

    // M_P/V_P coherence on valid tips.
    for (int probe = 0; probe < 3; ++probe) {
        const auto& pool = probe % 2 == 0 ? k.mined : k.order;
        const BlockId tip = pool[rng.below(pool.size())];
        if (!full.is_valid(tip, store.at(tip).time)) continue;
        const Block& tb = store.at(tip);
        const CoinId c = static_cast<CoinId>(rng.below(store.coin_count()));
        const Slot t = tb.time + 1 + rng.below(3);
        const ParticipantId caller = store.owner_at(tip, c);
        const auto mined = k.protocol->mine(store, tip, c, t, caller);
        Overlay ov(store);
        if (mined) {
            ov.add(*mined);
            Validator ovv(ov, *k.protocol);
            if (!ovv.is_valid(*mined, t)) fail("coherence", "mined block is invalid");
            if (*mined->pred != tip || *mined->witness != c || mined->time != t) fail("coherence", "coordinates differ");
        }
        bool exists = false;
        for (ParticipantId m = 0; m < k.participants; ++m) {
            const Block cand = make_block(tip, m, t, c, {}, expected_aux(*k.protocol, tb, t, m));
            Overlay co(store);
            co.add(cand);
            Validator cv(co, *k.protocol);
            exists = exists || cv.is_valid(cand, t);
        }
        if (exists != mined.has_value()) fail("coherence", "mine disagrees with the existence of a valid block");
    }
    return fails;
}

} // namespace stakesim::testing

#endif // STAKESIM_TESTS_PROPERTY_SUPPORT_HPP
