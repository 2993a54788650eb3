// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/scenarios.hpp>

namespace stakesim::scenarios {

namespace {

ParticipantConfig party(std::string name, std::uint32_t coins, std::uint32_t count, std::string kind)
{
    ParticipantConfig p;
    p.name = std::move(name);
    p.coins = coins;
    p.count = count;
    p.strategy.kind = std::move(kind);
    return p;
}

} // namespace

SimConfig honest(std::uint32_t miners, std::uint32_t coins_each, double p, Slot slots, std::uint64_t seed)
{
    SimConfig c;
    c.protocol = {"oracle", p, 1, 1};
    c.participants.push_back(party("miner", coins_each, miners, "honest"));
    c.slots = slots;
    c.seed = seed;
    return c;
}

SimConfig fork_miner(const std::string& kind, std::uint32_t D, std::uint32_t lambda, double p, Slot slots,
                     std::uint64_t seed)
{
    SimConfig c;
    c.protocol = {"oracle", p, 1, 1};
    auto attacker = party("attacker", 1, 1, kind);
    attacker.strategy.depth = D;
    c.participants.push_back(attacker);
    c.participants.push_back(party("honest", lambda - 1, 1, "honest"));
    c.slots = slots;
    c.seed = seed;
    c.record_slots = false;
    return c;
}

SimConfig selfish(SelfishMode mode, std::uint32_t attacker_coins, std::uint32_t total_coins, double p, Slot slots,
                  Slot horizon, std::uint64_t seed)
{
    SimConfig c;
    c.protocol = {"p1", p, 1, 1};
    auto attacker = party("attacker", attacker_coins, 1, mode == SelfishMode::Global ? "selfish-global" : "selfish-local");
    attacker.strategy.limits.horizon = horizon;
    c.participants.push_back(attacker);
    c.participants.push_back(party("honest", total_coins - attacker_coins, 1, "honest"));
    c.slots = slots;
    c.seed = seed;
    c.record_slots = false;
    return c;
}

SimConfig double_spend(std::uint32_t attacker_coins, std::uint32_t honest_coins, double p, std::uint32_t z,
                       std::uint64_t seed)
{
    SimConfig c;
    c.protocol = {"oracle", p, 1, 1};
    auto attacker = party("attacker", attacker_coins + 1, 1, "double-spend");
    attacker.strategy.confirm_depth = z;
    attacker.strategy.vendor = "vendor";
    attacker.strategy.start_slot = 1;
    c.participants.push_back(attacker);
    c.participants.push_back(party("honest", honest_coins, 1, "honest"));
    c.participants.push_back(party("vendor", 0, 1, "passive"));
    c.slots = 1'000'000;
    c.seed = seed;
    c.stop_when_finished = true;
    c.record_slots = false;
    return c;
}

SimConfig ghost_fork(std::uint32_t honest_coins, double p, Slot start_slot, Slot track_slots, const std::string& root,
                     std::uint64_t seed)
{
    SimConfig c;
    c.protocol = {"oracle", p, 1, 1};
    auto attacker = party("attacker", 1, 1, "exponential-fork");
    attacker.strategy.start_slot = start_slot;
    attacker.strategy.track_slots = track_slots;
    attacker.strategy.root = root;
    c.participants.push_back(attacker);
    auto h = party("honest", 1, honest_coins, "honest");
    h.fork_choice = ForkChoice::Ghost;
    c.participants.push_back(h);
    c.slots = 100'000;
    c.seed = seed;
    c.stop_when_finished = true;
    c.record_slots = false;
    return c;
}

} // namespace stakesim::scenarios
