// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/codec.hpp>
#include <stakesim/engine.hpp>
#include <stakesim/scenarios.hpp>

#include <doctest.h>

#include <numeric>

using namespace stakesim;

namespace {

Announcement announce(const Block& b, Slot at) { return {b, b.miner, at}; }

} // namespace

TEST_SUITE("engine")
{
    TEST_CASE("honest network: no deviations, consistent tallies")
    {
        const RunLog log = run(scenarios::honest(5, 2, 0.02, 2000, 7));
        CHECK(log.slots_run == 2000);
        CHECK(log.deviations.empty());
        CHECK(log.blocks == log.announcements.size());
        CHECK(log.final_score > 0);
        CHECK(log.final_score <= log.blocks);
        const Metrics m = metrics(log);
        CHECK(std::accumulate(m.share.begin(), m.share.end(), 0.0) == doctest::Approx(1.0));
        CHECK(m.honest_rate_per_coin > 0.0);
        std::uint64_t on_chain = 0;
        for (const auto& t : log.tallies) on_chain += t.on_best_chain;
        CHECK(on_chain == log.final_score);
    }

    TEST_CASE("runs are reproducible and seed-sensitive")
    {
        const auto cfg = scenarios::honest(4, 1, 0.05, 500, 3);
        CHECK(runlog_jsonl(run(cfg)) == runlog_jsonl(run(cfg)));
        CHECK(summary_json(run(cfg)).dump() == summary_json(run(cfg)).dump());
        auto other = cfg;
        other.seed = 4;
        CHECK(runlog_jsonl(run(other)) != runlog_jsonl(run(cfg)));
    }

    TEST_CASE("run log layout")
    {
        const RunLog log = run(scenarios::honest(3, 1, 0.1, 100, 1));
        const std::string jsonl = runlog_jsonl(log);
        const auto header = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
        CHECK(header["schema"] == kRunLogSchema);
        CHECK(summary_json(log)["schema"] == kSummarySchema);
        CHECK(summary_text(log).find("share") != std::string::npos);
    }

    TEST_CASE("detector: same-slot evidence")
    {
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const Block a = make_block(g, 0, 3, 0);
        const Block b = make_block(g, 0, 3, 0, {}, {0x01});
        store.insert(a);
        store.insert(b);
        const auto ev = detect(store, {announce(a, 3), announce(b, 3)});
        REQUIRE(ev.size() == 1);
        CHECK(ev[0].kind == DeviationKind::SameSlot);
        CHECK(ev[0].coin == 0);
        CHECK(to_string(ev[0].kind) == "same-slot");
        CHECK_FALSE(honest_explanation(store, {announce(a, 3), announce(b, 3)}).possible);
    }

    TEST_CASE("detector: regressive predecessor, in either arrival order")
    {
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const Block h = make_block(g, 1, 1, 1);
        const Block x = make_block(h.id, 0, 2, 0); // score 2
        const Block y = make_block(g, 0, 3, 0);    // later, built on score 0
        for (const Block* b : {&h, &x, &y}) store.insert(*b);
        for (bool swap : {false, true}) {
            std::vector<Announcement> as{announce(x, 2), announce(y, 3)};
            if (swap) std::swap(as[0], as[1]);
            const auto ev = detect(store, as);
            REQUIRE(ev.size() == 1);
            CHECK(ev[0].kind == DeviationKind::RegressivePredecessor);
            CHECK_FALSE(honest_explanation(store, as).possible);
        }
    }

    TEST_CASE("detector: an honest-looking history has an explanation")
    {
        ChainStore store({0, 1});
        const BlockId g = store.genesis();
        const Block a = make_block(g, 0, 1, 0);
        const Block h = make_block(g, 1, 1, 1);
        const Block b = make_block(h.id, 0, 2, 0); // pred score 1 >= score(a)
        for (const Block* blk : {&a, &h, &b}) store.insert(*blk);
        const std::vector<Announcement> as{announce(a, 1), announce(b, 2)};
        CHECK(detect(store, as).empty());
        const auto ex = honest_explanation(store, as);
        REQUIRE(ex.possible);
        CHECK(ex.order == std::vector<BlockId>{a.id, b.id});
        REQUIRE(ex.awareness.size() == 2);
    }

    TEST_CASE("UNaS is never flagged while the naive control is")
    {
        const RunLog unas = run(scenarios::fork_miner("unas", 10, 41, 0.02, 4000, 2));
        CHECK(unas.deviations.empty());
        const Metrics m = metrics(unas);
        CHECK(m.rate_vs_honest[0] > 1.2);
        const RunLog naive = run(scenarios::fork_miner("naive-fork", 10, 41, 0.02, 4000, 2));
        CHECK_FALSE(naive.deviations.empty());
    }

    TEST_CASE("double-spend run reports one attempt")
    {
        const RunLog log = run(scenarios::double_spend(2, 3, 0.01, 2, 5));
        const Metrics m = metrics(log);
        CHECK(m.double_spend_attempts == 1);
        CHECK(m.double_spend_successes <= 1);
        CHECK(log.deviations.empty());
    }

    TEST_CASE("exponential fork records the subtree trajectory")
    {
        const RunLog log = run(scenarios::ghost_fork(9, 0.1, 5, 20, "genesis", 1));
        const Metrics m = metrics(log);
        CHECK(m.ghost_own.size() == 21);
        CHECK(m.ghost_own[0] == 1);
        for (std::size_t k = 1; k < m.ghost_own.size(); ++k) CHECK(m.ghost_own[k] >= m.ghost_own[k - 1]);
    }

    TEST_CASE("configuration constraints")
    {
        auto bad = scenarios::honest(2, 1, 0.1, 10, 1);
        bad.protocol.p = 1.5;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = scenarios::honest(2, 1, 0.1, 10, 1);
        bad.participants[0].strategy.kind = "bogus";
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = scenarios::honest(2, 1, 0.1, 10, 1);
        bad.participants.push_back(bad.participants[0]);
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = scenarios::double_spend(1, 1, 0.1, 2, 1);
        bad.participants[0].strategy.vendor = "nobody";
        CHECK_THROWS_AS(bad.validate(), DomainError);
        CHECK_NOTHROW(scenarios::selfish(SelfishMode::Local, 3, 10, 0.01, 100, 64, 1).validate());
    }

    TEST_CASE("participants expand with indexed names")
    {
        const auto cfg = scenarios::honest(3, 2, 0.1, 10, 1);
        const auto ps = expand_participants(cfg);
        REQUIRE(ps.size() == 3);
        CHECK(ps[1].name == "miner-1");
        CHECK(ps[2].coins.size() == 2);
        CHECK(allocation_of(ps).size() == 6);
    }
}
