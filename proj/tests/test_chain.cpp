// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "property_support.hpp"

#include <stakesim/chain.hpp>
#include <stakesim/codec.hpp>
#include <stakesim/protocol.hpp>
#include <stakesim/view.hpp>

#include <doctest.h>

using namespace stakesim;

namespace {

// Always-eligible oracle, so chains can be built by hand.
std::unique_ptr<Protocol> always(std::uint32_t freeze = 1) { return make_random_oracle(1.0, 1, 5, freeze); }

BlockId grow(ChainStore& store, const Protocol& proto, const BlockId& tip, CoinId c, Slot t,
             std::vector<Transfer> payload = {})
{
    auto b = proto.mine(store, tip, c, t, store.owner_at(tip, c), std::move(payload));
    REQUIRE(b.has_value());
    REQUIRE(store.insert(*b));
    return b->id;
}

} // namespace

TEST_SUITE("chain")
{
    TEST_CASE("scores, predecessors and ancestry")
    {
        auto proto = always();
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const BlockId a = grow(store, *proto, g, 0, 1);
        const BlockId b = grow(store, *proto, a, 1, 2);
        const BlockId c = grow(store, *proto, a, 0, 3);
        CHECK(store.score(g) == 0);
        CHECK(store.score(b) == 2);
        CHECK(store.score(c) == 2);
        CHECK(*store.predecessor(b, 1) == a);
        CHECK(*store.predecessor(b, 2) == g);
        CHECK_FALSE(store.predecessor(b, 3).has_value());
        CHECK(store.ancestor_or_genesis(b, 9) == g);
        CHECK(store.is_ancestor(a, b));
        CHECK_FALSE(store.is_ancestor(b, c));
        CHECK(chain_to(store, b) == std::vector<BlockId>{g, a, b});
        CHECK(store.children(a).size() == 2);
    }

    TEST_CASE("insert rejects duplicates and dangling predecessors")
    {
        auto proto = always();
        ChainStore store({0});
        const BlockId a = grow(store, *proto, store.genesis(), 0, 1);
        CHECK_FALSE(store.insert(store.at(a)));
        BlockId nowhere;
        nowhere.bytes.fill(0xee);
        CHECK_THROWS_AS(store.insert(make_block(nowhere, 0, 4, 0)), StructuralError);
        CHECK_THROWS_AS(store.at(nowhere), LookupError);
        CHECK_THROWS_AS(ChainStore(std::vector<ParticipantId>{}), DomainError);
    }

    TEST_CASE("ledger replay follows the branch")
    {
        auto proto = always();
        ChainStore store({0, 1, 1});
        const BlockId g = store.genesis();
        const BlockId a = grow(store, *proto, g, 0, 1, {{2, 1, 0}});
        const BlockId b = grow(store, *proto, g, 1, 1);
        CHECK(store.owner_at(a, 2) == 0);
        CHECK(store.owner_at(b, 2) == 1);
        CHECK(store.owner_at_replay(a, 2) == 0);
        CHECK(store.owner_at(g, 2) == 1);
        CHECK_THROWS_AS(store.owner_at(a, 3), LookupError);
    }

    TEST_CASE("validity: time bound, ownership, payload, forged ids")
    {
        auto proto = always();
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const BlockId a = grow(store, *proto, g, 0, 1);
        Validator v(store, *proto);
        CHECK(v.is_valid(g, 0));
        CHECK_FALSE(v.is_valid(a, 0));
        CHECK(v.is_valid(a, 1));

        const Block wrong_miner = make_block(a, 0, 2, 1);
        const Block stale = make_block(a, 0, 1, 0);
        const Block bad_tx = make_block(a, 0, 2, 0, {{1, 0, 0}});
        Block forged = *proto->mine(store, a, 0, 2, 0);
        forged.id.bytes[0] ^= 1;
        for (const Block* b : std::initializer_list<const Block*>{&wrong_miner, &stale, &bad_tx, &forged}) {
            store.insert(*b);
            CHECK_FALSE(v.is_valid(b->id, 100));
        }
        // Descendants of invalid blocks are invalid.
        const Block child = make_block(wrong_miner.id, 0, 3, 0);
        store.insert(child);
        CHECK_FALSE(v.is_valid(child.id, 100));
        CHECK_FALSE(is_valid(store, child, 100, *proto));
    }

    TEST_CASE("freeze window requires ownership over F predecessors")
    {
        auto proto = always(2);
        ChainStore store({0, 0});
        const BlockId a = grow(store, *proto, store.genesis(), 0, 1, {{1, 0, 1}});
        // Coin 1 changed hands at a; its new owner may use it only after F more blocks.
        CHECK_FALSE(proto->mine(store, a, 1, 2, 1).has_value());
        CHECK_FALSE(proto->mine(store, a, 1, 2, 0).has_value());
        const BlockId b = grow(store, *proto, a, 0, 2);
        CHECK(proto->mine(store, b, 1, 3, 1).has_value());
    }

    TEST_CASE("best tip: maximum score, ties to the smallest id")
    {
        auto proto = always();
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const BlockId a = grow(store, *proto, g, 0, 1);
        const BlockId b = grow(store, *proto, g, 1, 1);
        const BlockId expect = a < b ? a : b;
        CHECK(best_tip(store, {a, b}, 5, *proto) == expect);
        CHECK(best_tip(store, {b, a}, 5, *proto) == expect);
        CHECK(best_tip(store, {a, b}, 0, *proto) == g);
        const BlockId c = grow(store, *proto, b, 1, 2);
        CHECK(best_tip(store, {a, b, c}, 5, *proto) == c);
    }

    TEST_CASE("overlay layers blocks without touching the base")
    {
        auto proto = always();
        ChainStore store({0, 1});
        const BlockId a = grow(store, *proto, store.genesis(), 0, 1);
        Overlay ov(store);
        const Block b = *proto->mine(ov, a, 1, 2, 1, {{1, 1, 0}});
        ov.add(b);
        CHECK(ov.contains(b.id));
        CHECK_FALSE(store.contains(b.id));
        CHECK(ov.score(b.id) == 2);
        CHECK(ov.owner_at(b.id, 1) == 0);
        CHECK(ov.holds_locally(b.id));
        Validator v(ov, *proto);
        CHECK(v.is_valid(b, 2));
    }

    TEST_CASE("GHOST descends into the heaviest subtree")
    {
        auto proto = always();
        ChainStore store({0, 1});
        ViewIndex index(store, true);
        const BlockId g = store.genesis();
        auto add = [&](const BlockId& tip, CoinId c, Slot t) {
            const BlockId id = grow(store, *proto, tip, c, t);
            index.on_insert(id);
            return id;
        };
        const BlockId a = add(g, 0, 1);
        const BlockId a1 = add(a, 0, 2);
        add(a, 1, 2);
        add(a, 1, 3);
        const BlockId b = add(g, 1, 1);
        const BlockId b1 = add(b, 1, 2);
        const BlockId b2 = add(b1, 1, 3);
        add(b2, 1, 4);
        add(a1, 0, 3);
        // The longest chain runs through b at score 4; a holds the heavier subtree.
        CHECK(index.ghost().weight(a) == 5);
        CHECK(index.ghost().weight(b) == 4);
        CHECK(store.is_ancestor(a, index.ghost_head()));
        CHECK(store.is_ancestor(b, index.best()));
        CHECK(ghost_fork_choice(store, index.ghost()) == index.ghost_head());
    }

    TEST_CASE("validity laws on randomized stores")
    {
        for (std::uint64_t seed = 1; seed <= 300; ++seed) {
            const auto fails = testing::check_case(seed, 60);
            for (const auto& f : fails) FAIL_CHECK(f.property << ": " << f.detail);
        }
    }
}
