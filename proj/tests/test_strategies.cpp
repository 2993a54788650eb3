// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/lookahead.hpp>
#include <stakesim/protocol.hpp>
#include <stakesim/strategies.hpp>
#include <stakesim/view.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace stakesim;

namespace {

struct World {
    std::unique_ptr<Protocol> proto = make_random_oracle(1.0, 1, 3);
    ChainStore store;
    ViewIndex index;

    explicit World(std::vector<ParticipantId> alloc) : store(std::move(alloc)), index(store, true) {}

    BlockId add(const BlockId& tip, CoinId c, Slot t)
    {
        auto b = proto->mine(store, tip, c, t, store.owner_at(tip, c));
        REQUIRE(b.has_value());
        store.insert(*b);
        index.on_insert(b->id);
        return b->id;
    }

    MinerView view(ParticipantId self, std::vector<CoinId> coins, Slot clock)
    {
        return MinerView{&store, &index, self, std::move(coins), clock, ForkChoice::LongestChain};
    }
};

} // namespace

TEST_SUITE("strategies")
{
    TEST_CASE("global trigger takes the largest strictly winning lead")
    {
        SelfLeads self;
        self.first = {{1, 5}, {2, 8}, {3, 30}};
        LeadMap others;
        others.first = {{1, 4}, {2, 10}};
        others.complete_through = 20;
        CHECK(global_trigger(self, others) == 2u);
        others.first[2] = 8; // a tie is not a win
        CHECK_FALSE(global_trigger(self, others).has_value());
        others.complete_through = 40; // k = 3 is now inside the searched window and unmatched
        CHECK(global_trigger(self, others) == 3u);
        others.exact = false;
        CHECK_FALSE(global_trigger(self, others).has_value());
    }

    TEST_CASE("local trigger compares against the cutoffs")
    {
        SelfLeads self;
        self.first = {{1, 12}, {2, 20}};
        CHECK(local_trigger(self, {3, 8}, 10) == 1u);
        CHECK(local_trigger(self, {3, 10}, 10) == 2u);
        CHECK_FALSE(local_trigger(self, {1, 5}, 10).has_value());
        CHECK(local_trigger(self, {1, std::numeric_limits<Slot>::max()}, 10) == 2u);
    }

    TEST_CASE("race cutoffs and per-slot rate")
    {
        CHECK(per_slot_rate(0.1, 3) == doctest::Approx(1 - std::pow(0.9, 3)));
        CHECK(per_slot_rate(0.1, 0) == 0.0);
        const auto cut = race_cutoffs(0.5, 6);
        REQUIRE(cut.size() == 6);
        CHECK(cut[0] == 1);
        for (std::size_t i = 1; i < cut.size(); ++i) CHECK(cut[i] > cut[i - 1]);
        // Median of a negative binomial: 2 successes at rate 0.5 take 3 slots half the time.
        CHECK(cut[1] == 3);
    }

    TEST_CASE("self lookahead on an always-eligible coin")
    {
        World w({0, 1});
        const auto leads = lookahead_self(w.store, *w.proto, 0, {0}, w.store.genesis(), 0, LookaheadLimits{});
        REQUIRE(leads.first.size() >= 5);
        for (std::uint32_t k = 1; k <= 5; ++k) {
            CHECK(*leads.at(k) == k);
            CHECK(leads.path.at(k).size() == k);
        }
    }

    TEST_CASE("announcement memory flags same-slot and regressive blocks")
    {
        World w({0, 1});
        const BlockId g = w.store.genesis();
        const BlockId a = w.add(g, 1, 1);
        const BlockId b = w.add(a, 0, 2);
        AnnouncementMemory mem;
        mem.record(w.store, w.store.at(b));
        CHECK_FALSE(mem.safe(w.store, *w.proto->mine(w.store, a, 0, 2, 0)));
        CHECK_FALSE(mem.safe(w.store, *w.proto->mine(w.store, g, 0, 3, 0)));
        CHECK_FALSE(mem.safe(w.store, *w.proto->mine(w.store, a, 0, 3, 0)));
        CHECK(mem.safe(w.store, *w.proto->mine(w.store, b, 0, 3, 0)));
    }

    TEST_CASE("honest step mines on the best tip with owned coins only")
    {
        World w({0, 0, 1});
        const BlockId a = w.add(w.store.genesis(), 2, 1);
        const auto out = honest_step(w.view(0, {0, 1, 2}, 2), *w.proto, 2);
        REQUIRE(out.size() == 2);
        for (const auto& b : out) {
            CHECK(*b.pred == a);
            CHECK(b.miner == 0);
            CHECK(b.time == 2);
        }
    }

    TEST_CASE("UNaS forks only when it cannot be proven")
    {
        World w({0, 1});
        BlockId tip = w.store.genesis();
        for (Slot t = 1; t <= 4; ++t) tip = w.add(tip, 1, t);
        // Eligible everywhere except on the best tip, so only the fork candidate exists.
        const BlockId A = tip;
        CustomProtocol proto("not-on-tip", 0.5, 1, std::make_shared<const OracleKey>(1),
                             [A](const OracleKey&, const Block& b, CoinId, Slot) { return b.id != A; });
        AnnouncementMemory mem;
        const auto first = unas_step(w.view(0, {0}, 5), proto, 2, 5, mem);
        REQUIRE(first.size() == 1);
        // Pred^2(A) has score 2; the best block outside its subtree has score 1.
        CHECK(w.store.score(*first[0].pred) == 1);
        w.store.insert(first[0]);
        w.index.on_insert(first[0].id);
        // The fork target is now the block just announced, which is safe to extend.
        const auto second = unas_step(w.view(0, {0}, 6), proto, 2, 6, mem);
        REQUIRE(second.size() == 1);
        CHECK(*second[0].pred == first[0].id);
        // A block below the recorded score is refused.
        const Block low = *proto.mine(w.store, *first[0].pred, 0, 7, 0);
        CHECK_FALSE(mem.safe(w.store, low));
    }

    TEST_CASE("UNaS never announces two blocks of a coin in one slot")
    {
        World w({0, 1});
        BlockId tip = w.store.genesis();
        for (Slot t = 1; t <= 4; ++t) tip = w.add(tip, 1, t);
        AnnouncementMemory mem;
        const auto out = unas_step(w.view(0, {0}, 5), *w.proto, 2, 5, mem);
        REQUIRE(out.size() == 1);
        CHECK(*out[0].pred == tip);
        CHECK(naive_fork_step(w.view(0, {0}, 5), *w.proto, 2, 5).size() == 2);
    }

    TEST_CASE("subtree collects every descendant")
    {
        World w({0});
        const BlockId g = w.store.genesis();
        const BlockId a = w.add(g, 0, 1);
        w.add(a, 0, 2);
        w.add(a, 0, 3);
        w.add(g, 0, 2);
        CHECK(subtree(w.store, a).size() == 3);
        CHECK(subtree(w.store, g).size() == 5);
    }

    TEST_CASE("exponential fork mines on every subtree block")
    {
        World w({0, 1});
        const BlockId g = w.store.genesis();
        const BlockId a = w.add(g, 0, 1);
        w.add(a, 0, 2);
        const auto out = exponential_fork_step(w.view(0, {0}, 3), *w.proto, a, 3);
        CHECK(out.size() == 2);
    }
}
