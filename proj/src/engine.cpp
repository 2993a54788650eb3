// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/engine.hpp>

#include <stakesim/codec.hpp>
#include <stakesim/rng.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace stakesim {

namespace {

const std::set<std::string>& strategy_kinds()
{
    static const std::set<std::string> kinds{"honest",         "passive",       "unas",         "naive-fork",
                                             "selfish-global", "selfish-local", "double-spend", "exponential-fork"};
    return kinds;
}

bool attacking(const std::string& kind) { return kind != "honest" && kind != "passive"; }

std::string fork_choice_name(ForkChoice f) { return f == ForkChoice::Ghost ? "ghost" : "longest-chain"; }

nlohmann::json limits_json(const LookaheadLimits& l)
{
    return {{"horizon", l.horizon}, {"k_max", l.k_max}, {"node_budget", l.node_budget}};
}

// Depth of the reorg from old to now: blocks of old's chain that left the best chain.
std::uint64_t reorg_depth(const ChainStore& store, const BlockId& old_tip, const BlockId& new_tip)
{
    BlockId a = old_tip;
    BlockId b = new_tip;
    std::uint64_t sa = store.score(a);
    std::uint64_t sb = store.score(b);
    const std::uint64_t start = sa;
    if (sb > sa) {
        b = *store.predecessor(b, sb - sa);
        sb = sa;
    } else if (sa > sb) {
        a = *store.predecessor(a, sa - sb);
        sa = sb;
    }
    while (a != b) {
        a = *store.at(a).pred;
        b = *store.at(b).pred;
        --sa;
    }
    return start - sa;
}

struct Runtime {
    Participant who;
    std::unique_ptr<Strategy> strategy;
    std::set<CoinId> candidates;
};

std::unique_ptr<Strategy> make_strategy(const Participant& p, const std::vector<Participant>& all, ParticipantId alias)
{
    const StrategyConfig& s = p.config->strategy;
    if (s.kind == "honest") return std::make_unique<HonestStrategy>();
    if (s.kind == "passive") return std::make_unique<PassiveStrategy>();
    if (s.kind == "unas") return std::make_unique<UnasStrategy>(s.depth);
    if (s.kind == "naive-fork") return std::make_unique<NaiveForkStrategy>(s.depth);
    if (s.kind == "selfish-global") return std::make_unique<SelfishStrategy>(SelfishMode::Global, s.limits);
    if (s.kind == "selfish-local") return std::make_unique<SelfishStrategy>(SelfishMode::Local, s.limits);
    if (s.kind == "exponential-fork") return std::make_unique<ExponentialForkStrategy>(s.start_slot, s.track_slots, s.root == "head");
    if (s.kind == "double-spend") {
        auto vendor = std::find_if(all.begin(), all.end(), [&](const Participant& q) { return q.name == s.vendor; });
        if (vendor == all.end()) throw DomainError("double-spend vendor '" + s.vendor + "' is not a participant");
        const Transfer tx{p.coins.back(), p.id, vendor->id};
        const auto trigger = s.trigger == "predictive" ? DoubleSpendTrigger::Predictive : DoubleSpendTrigger::Always;
        return std::make_unique<DoubleSpendStrategy>(trigger, tx, alias, s.confirm_depth, s.start_slot, s.limits);
    }
    throw DomainError("unknown strategy kind '" + s.kind + "'");
}

} // namespace

void SimConfig::validate() const
{
    if (protocol.name != "oracle" && protocol.name != "p1" && protocol.name != "p2" && protocol.name != "p3") {
        throw DomainError("protocol.name must be one of oracle, p1, p2, p3");
    }
    if (!(protocol.p > 0.0 && protocol.p < 1.0)) throw DomainError("protocol.p must lie in (0, 1)");
    if (protocol.ell < 1) throw DomainError("protocol.ell must be at least 1");
    if (protocol.freeze < 1) throw DomainError("protocol.freeze must be at least 1");
    if (participants.empty()) throw DomainError("at least one participant is required");
    std::uint64_t staking = 0;
    std::set<std::string> names;
    for (const auto& p : participants) {
        if (p.name.empty()) throw DomainError("participant name must not be empty");
        if (!names.insert(p.name).second) throw DomainError("duplicate participant name '" + p.name + "'");
        if (p.count < 1) throw DomainError("participant '" + p.name + "': count must be at least 1");
        const auto& s = p.strategy;
        if (!strategy_kinds().count(s.kind)) throw DomainError("participant '" + p.name + "': unknown strategy '" + s.kind + "'");
        std::uint32_t stake = p.coins;
        if (s.kind == "double-spend") {
            if (p.coins < 1) throw DomainError("participant '" + p.name + "': double-spend needs a payment coin");
            if (p.count != 1) throw DomainError("participant '" + p.name + "': double-spend requires count 1");
            if (s.trigger != "always" && s.trigger != "predictive") {
                throw DomainError("participant '" + p.name + "': trigger must be always or predictive");
            }
            if (s.confirm_depth < 1) throw DomainError("participant '" + p.name + "': confirm_depth must be at least 1");
            if (s.vendor.empty() || s.vendor == p.name) {
                throw DomainError("participant '" + p.name + "': vendor must name another participant");
            }
            stake -= 1;
        }
        if (s.kind == "exponential-fork" && s.root != "head" && s.root != "genesis") {
            throw DomainError("participant '" + p.name + "': root must be head or genesis");
        }
        if (s.kind == "selfish-global" || s.kind == "selfish-local" || s.kind == "double-spend") {
            if (s.limits.horizon < 1 || s.limits.k_max < 1 || s.limits.node_budget < 1) {
                throw DomainError("participant '" + p.name + "': lookahead limits must be positive");
            }
        }
        staking += static_cast<std::uint64_t>(stake) * p.count;
    }
    for (const auto& p : participants) {
        if (p.strategy.kind == "double-spend" && !names.count(p.strategy.vendor)) {
            throw DomainError("participant '" + p.name + "': vendor '" + p.strategy.vendor + "' is not a participant");
        }
    }
    if (staking < 1) throw DomainError("at least one staking coin is required");
}

nlohmann::json SimConfig::to_json() const
{
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : participants) {
        nlohmann::json s = {{"kind", p.strategy.kind}};
        const auto& k = p.strategy.kind;
        if (k == "unas" || k == "naive-fork") s["depth"] = p.strategy.depth;
        if (k == "selfish-global" || k == "selfish-local" || k == "double-spend") s["limits"] = limits_json(p.strategy.limits);
        if (k == "double-spend") {
            s["trigger"] = p.strategy.trigger;
            s["confirm_depth"] = p.strategy.confirm_depth;
            s["vendor"] = p.strategy.vendor;
        }
        if (k == "double-spend" || k == "exponential-fork") s["start_slot"] = p.strategy.start_slot;
        if (k == "exponential-fork") {
            s["track_slots"] = p.strategy.track_slots;
            s["root"] = p.strategy.root;
        }
        ps.push_back({{"name", p.name},
                      {"coins", p.coins},
                      {"count", p.count},
                      {"fork_choice", fork_choice_name(p.fork_choice)},
                      {"strategy", s}});
    }
    return {{"protocol",
             {{"name", protocol.name}, {"p", protocol.p}, {"ell", protocol.ell}, {"freeze", protocol.freeze}}},
            {"participants", ps},
            {"slots", slots},
            {"seed", seed},
            {"detector", detector},
            {"stop_when_finished", stop_when_finished},
            {"record_slots", record_slots}};
}

std::vector<Participant> expand_participants(const SimConfig& config)
{
    std::vector<Participant> out;
    CoinId next = 0;
    for (const auto& pc : config.participants) {
        for (std::uint32_t i = 0; i < pc.count; ++i) {
            Participant p;
            p.id = static_cast<ParticipantId>(out.size());
            p.name = pc.count == 1 ? pc.name : pc.name + "-" + std::to_string(i);
            p.config = &pc;
            for (std::uint32_t j = 0; j < pc.coins; ++j) p.coins.push_back(next++);
            p.staking_coins = pc.strategy.kind == "double-spend" ? pc.coins - 1 : pc.coins;
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<ParticipantId> allocation_of(const std::vector<Participant>& participants)
{
    std::vector<ParticipantId> owners;
    for (const auto& p : participants) {
        for (std::size_t j = 0; j < p.coins.size(); ++j) owners.push_back(p.id);
    }
    return owners;
}

std::unique_ptr<Protocol> make_protocol(const ProtocolConfig& config, std::uint64_t seed)
{
    if (config.name == "oracle") return make_random_oracle(config.p, config.ell, seed, config.freeze);
    if (config.name == "p1") return make_p1(config.p, seed, config.freeze);
    if (config.name == "p2") return make_p2(config.p, seed, config.freeze);
    if (config.name == "p3") return make_p3(config.p, seed, config.freeze);
    throw DomainError("unknown protocol '" + config.name + "'");
}

RunLog run(const SimConfig& config)
{
    config.validate();
    const auto participants = expand_participants(config);
    const auto protocol = make_protocol(config.protocol, derive_seed(config.seed, 0));

    ChainStore store(allocation_of(participants));
    bool ghost = false;
    for (const auto& p : participants) {
        ghost = ghost || p.config->fork_choice == ForkChoice::Ghost || p.config->strategy.kind == "exponential-fork";
    }
    ViewIndex index(store, ghost);
    Detector detector(store);
    Overlay staged(store);
    Validator validator(staged, *protocol);

    std::vector<Runtime> rt;
    ParticipantId next_alias = static_cast<ParticipantId>(participants.size());
    for (const auto& p : participants) {
        const bool ds = p.config->strategy.kind == "double-spend";
        Runtime r{p, make_strategy(p, participants, ds ? next_alias++ : 0), {}};
        r.candidates.insert(p.coins.begin(), p.coins.end());
        rt.push_back(std::move(r));
    }
    std::vector<std::size_t> order(rt.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle(derive_seed(config.seed, 1));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    const bool any_attacker =
        std::any_of(rt.begin(), rt.end(), [](const Runtime& r) { return attacking(r.strategy->kind()); });

    RunLog log;
    log.config = config.to_json();
    std::vector<std::uint64_t> announced(rt.size(), 0);
    std::vector<Transfer> mempool;
    BlockId best = index.best();

    for (Slot t = 1; t <= config.slots; ++t) {
        std::vector<Announcement> sent;
        std::vector<Transfer> txs;
        for (std::size_t i : order) {
            Runtime& r = rt[i];
            MinerView view;
            view.store = &store;
            view.index = &index;
            view.self = r.who.id;
            view.coins.assign(r.candidates.begin(), r.candidates.end());
            view.clock = t;
            view.fork_choice = r.who.config->fork_choice;
            StepOutput out = r.strategy->step(view, *protocol, mempool);
            for (auto& b : out.blocks) {
                if (store.find(b.id) || staged.holds_locally(b.id)) {
                    throw std::logic_error(r.who.name + " announced block " + b.id.hex() + " twice");
                }
                if (b.miner != r.who.id || !validator.is_valid(b, t)) {
                    throw std::logic_error(r.who.name + " announced invalid block " + b.id.hex());
                }
                staged.add(b);
                sent.push_back({std::move(b), r.who.id, t});
            }
            for (auto& tx : out.txs) {
                if (tx.from != r.who.id) throw std::logic_error(r.who.name + " announced a transfer it cannot sign");
                txs.push_back(tx);
            }
        }
        staged.clear();

        // Zero latency at slot granularity: this slot's announcements reach everyone for t+1.
        SlotRecord rec;
        rec.slot = t;
        for (auto& a : sent) {
            store.insert(a.block);
            index.on_insert(a.block.id);
            ++announced[a.by];
            for (const auto& tx : a.block.payload) {
                if (tx.to < rt.size()) rt[tx.to].candidates.insert(tx.coin);
            }
            if (config.detector) {
                auto ev = detector.observe(a);
                rec.deviations.insert(rec.deviations.end(), ev.begin(), ev.end());
            }
        }
        mempool.insert(mempool.end(), txs.begin(), txs.end());

        const BlockId now_best = index.best();
        if (now_best != best) {
            log.max_reorg_depth = std::max(log.max_reorg_depth, reorg_depth(store, best, now_best));
            best = now_best;
        }
        log.deviations.insert(log.deviations.end(), rec.deviations.begin(), rec.deviations.end());
        log.announcements.insert(log.announcements.end(), sent.begin(), sent.end());
        if (config.record_slots && (!sent.empty() || !txs.empty())) {
            rec.announcements = std::move(sent);
            rec.txs = std::move(txs);
            rec.best = best;
            rec.score = index.best_score();
            log.records.push_back(std::move(rec));
        }
        log.slots_run = t;

        if (config.stop_when_finished && any_attacker &&
            std::all_of(rt.begin(), rt.end(), [](const Runtime& r) {
                return !attacking(r.strategy->kind()) || r.strategy->finished();
            })) {
            break;
        }
    }

    log.final_best = index.best();
    log.final_score = index.best_score();
    log.blocks = store.size() - 1;

    std::vector<std::uint64_t> on_chain(rt.size(), 0);
    for (const auto& id : chain_to(store, log.final_best)) {
        const Block& b = store.at(id);
        if (b.pred) ++on_chain[b.miner];
    }
    std::uint64_t total_stake = 0;
    for (const auto& r : rt) total_stake += r.who.staking_coins;
    for (const auto& r : rt) {
        ParticipantTally tally;
        tally.id = r.who.id;
        tally.name = r.who.name;
        tally.kind = r.strategy->kind();
        tally.coins = r.who.staking_coins;
        tally.stake = static_cast<double>(r.who.staking_coins) / static_cast<double>(total_stake);
        tally.announced = announced[r.who.id];
        tally.on_best_chain = on_chain[r.who.id];
        tally.report = r.strategy->report();
        log.tallies.push_back(std::move(tally));
    }
    return log;
}

Metrics metrics(const RunLog& log)
{
    Metrics m;
    m.max_reorg_depth = log.max_reorg_depth;
    std::uint64_t honest_announced = 0;
    std::uint64_t honest_coins = 0;
    const double slots = static_cast<double>(std::max<Slot>(log.slots_run, 1));
    for (const auto& t : log.tallies) {
        m.share.push_back(log.final_score ? static_cast<double>(t.on_best_chain) / static_cast<double>(log.final_score)
                                          : 0.0);
        m.rate_per_coin.push_back(t.coins ? static_cast<double>(t.announced) / t.coins / slots : 0.0);
        if (t.kind == "honest") {
            honest_announced += t.announced;
            honest_coins += t.coins;
        }
        if (t.kind == "double-spend") {
            m.double_spend_attempts += t.report.value("attempted", false);
            m.double_spend_successes += t.report.value("success", false);
        }
        if (t.kind == "exponential-fork") {
            m.ghost_subtree = t.report.at("subtree_size").get<std::vector<std::uint64_t>>();
            m.ghost_own = t.report.at("own_blocks").get<std::vector<std::uint64_t>>();
            m.ghost_captured = t.report.at("captured").get<std::vector<int>>();
        }
    }
    m.honest_rate_per_coin = honest_coins ? static_cast<double>(honest_announced) / honest_coins / slots : 0.0;
    for (double r : m.rate_per_coin) {
        m.rate_vs_honest.push_back(m.honest_rate_per_coin > 0.0 ? r / m.honest_rate_per_coin : 0.0);
    }
    return m;
}

} // namespace stakesim
