// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/strategies.hpp>

#include <algorithm>
#include <deque>

namespace stakesim {

namespace {

void check_clock(const MinerView& view, Slot t)
{
    if (t != view.clock) throw DomainError("step slot must equal the view clock");
}

nlohmann::json id_json(const BlockId& id) { return id.hex(); }

} // namespace

BlockId MinerView::best_tip() const
{
    return fork_choice == ForkChoice::Ghost ? index->ghost_head() : index->best();
}

std::vector<Transfer> admissible(const BlockSource& source, const BlockId& tip, const std::vector<Transfer>& mempool)
{
    std::vector<Transfer> out;
    std::vector<std::pair<CoinId, ParticipantId>> moved;
    for (const auto& tx : mempool) {
        if (tx.coin >= source.coin_count()) continue;
        ParticipantId owner = source.owner_at(tip, tx.coin);
        for (const auto& [coin, to] : moved) {
            if (coin == tx.coin) owner = to;
        }
        if (owner != tx.from) continue;
        out.push_back(tx);
        moved.emplace_back(tx.coin, tx.to);
    }
    return out;
}

std::vector<Block> honest_step(const MinerView& view, const Protocol& protocol, Slot t,
                               const std::vector<Transfer>& mempool)
{
    check_clock(view, t);
    const BlockId A = view.best_tip();
    const auto payload = admissible(*view.store, A, mempool);
    std::vector<Block> out;
    for (CoinId c : view.coins) {
        if (auto b = protocol.mine(*view.store, A, c, t, view.self, payload)) out.push_back(std::move(*b));
    }
    return out;
}

void AnnouncementMemory::record(const BlockSource& source, const Block& b)
{
    if (!b.witness || !b.pred) return;
    const std::uint64_t s = source.score(*b.pred) + 1;
    auto [it, fresh] = max_score.emplace(*b.witness, s);
    if (!fresh) it->second = std::max(it->second, s);
    auto [jt, fresh_slot] = last_slot.emplace(*b.witness, b.time);
    if (!fresh_slot) jt->second = std::max(jt->second, b.time);
}

bool AnnouncementMemory::safe(const BlockSource& source, const Block& b) const
{
    if (!b.witness || !b.pred) return false;
    const CoinId c = *b.witness;
    if (auto it = last_slot.find(c); it != last_slot.end() && it->second >= b.time) return false;
    if (auto it = max_score.find(c); it != max_score.end() && source.score(*b.pred) < it->second) return false;
    return true;
}

namespace {

std::optional<BlockId> fork_target(const MinerView& view, std::uint32_t D, const BlockId& A)
{
    auto root = view.store->predecessor(A, D);
    if (!root) return std::nullopt;
    return view.index->best_outside(*root);
}

} // namespace

std::vector<Block> unas_step(const MinerView& view, const Protocol& protocol, std::uint32_t D, Slot t,
                             AnnouncementMemory& memory, const std::vector<Transfer>& mempool)
{
    check_clock(view, t);
    const BlockId A = view.index->best();
    const auto alt = fork_target(view, D, A);
    const auto payload = admissible(*view.store, A, mempool);
    std::vector<Block> out;
    for (CoinId c : view.coins) {
        if (auto b = protocol.mine(*view.store, A, c, t, view.self, payload)) {
            memory.record(*view.store, *b);
            out.push_back(std::move(*b));
        }
        if (!alt) continue;
        if (auto b2 = protocol.mine(*view.store, *alt, c, t, view.self)) {
            if (memory.safe(*view.store, *b2)) {
                memory.record(*view.store, *b2);
                out.push_back(std::move(*b2));
            }
        }
    }
    return out;
}

std::vector<Block> naive_fork_step(const MinerView& view, const Protocol& protocol, std::uint32_t D, Slot t,
                                   const std::vector<Transfer>& mempool)
{
    check_clock(view, t);
    const BlockId A = view.index->best();
    const auto alt = fork_target(view, D, A);
    const auto payload = admissible(*view.store, A, mempool);
    std::vector<Block> out;
    for (CoinId c : view.coins) {
        if (auto b = protocol.mine(*view.store, A, c, t, view.self, payload)) out.push_back(std::move(*b));
        if (!alt) continue;
        if (auto b2 = protocol.mine(*view.store, *alt, c, t, view.self)) out.push_back(std::move(*b2));
    }
    return out;
}

StepOutput HonestStrategy::step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool)
{
    return {honest_step(view, protocol, view.clock, mempool), {}};
}

StepOutput UnasStrategy::step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool)
{
    StepOutput out{unas_step(view, protocol, D_, view.clock, memory_, mempool), {}};
    const BlockId A = view.index->best();
    for (const auto& b : out.blocks) {
        if (*b.pred == A) {
            ++on_best_;
        } else {
            ++off_best_;
        }
    }
    return out;
}

nlohmann::json UnasStrategy::report() const
{
    return {{"depth", D_}, {"on_best_tip", on_best_}, {"off_best_tip", off_best_}};
}

StepOutput NaiveForkStrategy::step(const MinerView& view, const Protocol& protocol,
                                   const std::vector<Transfer>& mempool)
{
    return {naive_fork_step(view, protocol, D_, view.clock, mempool), {}};
}

std::optional<std::uint32_t> global_trigger(const SelfLeads& self, const LeadMap& others)
{
    if (!others.exact) return std::nullopt;
    for (auto it = self.first.rbegin(); it != self.first.rend(); ++it) {
        const auto [k, t_prime] = *it;
        if (t_prime > others.complete_through) continue;
        auto t_star = others.at(k);
        if (!t_star || *t_star > t_prime) return k;
    }
    return std::nullopt;
}

std::optional<std::uint32_t> local_trigger(const SelfLeads& self, const std::vector<Slot>& cutoffs, Slot now)
{
    for (auto it = self.first.rbegin(); it != self.first.rend(); ++it) {
        const auto [k, t_prime] = *it;
        if (k > cutoffs.size()) continue;
        const Slot cut = cutoffs[k - 1];
        if (cut == std::numeric_limits<Slot>::max() || t_prime <= now + cut) return k;
    }
    return std::nullopt;
}

std::optional<std::uint32_t> SelfishStrategy::plan_from(const MinerView& view, const Protocol& protocol,
                                                        SelfLeads& self, LeadMap& others)
{
    const BlockId A = view.index->best();
    const Slot now = view.clock - 1; // the current slot is still open
    self = lookahead_self(*view.store, protocol, view.self, view.coins, A, now, limits_);
    if (self.first.empty()) return std::nullopt;
    if (mode_ == SelfishMode::Global) {
        others = lookahead_others(*view.store, protocol, view.self, A, now, limits_, view.observer(),
                                  &self.first);
        return global_trigger(self, others);
    }
    if (cutoffs_.empty()) {
        std::size_t rest = 0;
        for (CoinId c = 0; c < view.store->coin_count(); ++c) rest += view.store->owner_at(A, c) != view.self;
        cutoffs_ = race_cutoffs(per_slot_rate(protocol.success_prob(), rest), limits_.k_max);
    }
    for (std::uint32_t k = 1; k <= cutoffs_.size(); ++k) {
        if (cutoffs_[k - 1] != std::numeric_limits<Slot>::max()) others.first[k] = now + cutoffs_[k - 1];
    }
    others.exact = false;
    return local_trigger(self, cutoffs_, now);
}

StepOutput SelfishStrategy::advance(const MinerView& view)
{
    const Slot t = view.clock;
    for (const auto& b : plan_->path) {
        if (b.time == t) plan_->withheld.push_back(b);
    }
    if (t < plan_->release) return {};
    StepOutput out;
    out.blocks = plan_->withheld;
    auto& ep = episodes_.back();
    ep.released = true;
    pending_check_ = episodes_.size() - 1;
    plan_.reset();
    return out;
}

StepOutput SelfishStrategy::step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool)
{
    const Slot t = view.clock;
    if (pending_check_) {
        auto& ep = episodes_[*pending_check_];
        const std::uint64_t s = view.store->score(ep.tip);
        ep.unique_best = view.index->best() == ep.tip && view.index->count_at_score(s) == 1 &&
                         view.index->best_score() == s;
        pending_check_.reset();
    }
    if (plan_) {
        const std::uint64_t target = view.store->score(plan_->base) + plan_->k;
        if (mode_ == SelfishMode::Local && view.index->best_score() >= target) {
            episodes_.back().abandoned = true;
            plan_.reset();
        } else {
            return advance(view);
        }
    }

    const BlockId A = view.index->best();
    if (evaluated_base_ != A) {
        evaluated_base_ = A;
        SelfLeads self;
        LeadMap others;
        if (auto k = plan_from(view, protocol, self, others)) {
            SelfishPlan plan;
            plan.base = A;
            plan.k = *k;
            plan.t_prime = self.first;
            plan.t_star = others.first;
            plan.path = self.path.at(*k);
            plan.release = self.first.at(*k);
            for (std::uint32_t j = 1; j <= cutoffs_.size(); ++j) plan.cutoffs[j] = cutoffs_[j - 1];
            WithholdEpisode ep;
            ep.start = t;
            ep.release = plan.release;
            ep.k = plan.k;
            ep.base = A;
            ep.tip = plan.path.back().id;
            episodes_.push_back(ep);
            plan_ = std::move(plan);
            return advance(view);
        }
    }
    return {honest_step(view, protocol, t, mempool), {}};
}

nlohmann::json SelfishStrategy::report() const
{
    nlohmann::json eps = nlohmann::json::array();
    std::uint64_t released = 0, abandoned = 0, unique = 0, not_unique = 0;
    for (const auto& ep : episodes_) {
        released += ep.released;
        abandoned += ep.abandoned;
        if (ep.unique_best) (*ep.unique_best ? unique : not_unique) += 1;
        nlohmann::json e = {{"start", ep.start}, {"release", ep.release}, {"k", ep.k},
                            {"base", id_json(ep.base)}, {"tip", id_json(ep.tip)},
                            {"released", ep.released}, {"abandoned", ep.abandoned}};
        e["unique_best"] = ep.unique_best ? nlohmann::json(*ep.unique_best) : nlohmann::json(nullptr);
        eps.push_back(std::move(e));
    }
    return {{"mode", mode_ == SelfishMode::Global ? "global" : "local"},
            {"episodes", eps},
            {"released", released},
            {"abandoned", abandoned},
            {"released_unique_best", unique},
            {"released_not_unique_best", not_unique}};
}

DoubleSpendStrategy::DoubleSpendStrategy(DoubleSpendTrigger trigger, Transfer tx, ParticipantId alias,
                                         std::uint32_t confirm_depth, Slot start_slot, LookaheadLimits limits)
    : trigger_(trigger), start_slot_(start_slot), limits_(limits)
{
    if (confirm_depth < 1) throw DomainError("confirmation depth must be at least 1");
    if (alias == tx.from || alias == tx.to) throw DomainError("double-spend alias must be a fresh key");
    plan_.tx = tx;
    plan_.alias = alias;
    plan_.confirm_depth = confirm_depth;
}

std::vector<CoinId> DoubleSpendStrategy::staking_coins(const MinerView& view) const
{
    std::vector<CoinId> coins;
    for (CoinId c : view.coins) {
        if (c != plan_.tx.coin) coins.push_back(c);
    }
    return coins;
}

bool DoubleSpendStrategy::goods_delivered(const MinerView& view, std::uint64_t public_length) const
{
    if (public_length + 1 < plan_.confirm_depth) return false;
    if (plan_.confirm_depth == 1) return true;
    return view.store->owner_at(view.index->best(), plan_.tx.coin) == plan_.tx.to;
}

void DoubleSpendStrategy::finish(Slot t, bool aborted)
{
    outcome_.aborted = aborted;
    outcome_.end = t;
    plan_.phase = DoubleSpendPhase::Done;
}

StepOutput DoubleSpendStrategy::step(const MinerView& view, const Protocol& protocol,
                                     const std::vector<Transfer>& mempool)
{
    if (plan_.phase == DoubleSpendPhase::Done) {
        MinerView honest = view;
        honest.coins = staking_coins(view);
        return {honest_step(honest, protocol, view.clock, mempool), {}};
    }
    if (plan_.phase == DoubleSpendPhase::Released) {
        const BlockId best = view.index->best();
        outcome_.success = outcome_.goods && best == private_.back().id &&
                           view.store->owner_at(best, plan_.tx.coin) == plan_.alias;
        finish(view.clock, false);
        return {};
    }
    return trigger_ == DoubleSpendTrigger::Always ? race(view, protocol) : predictive(view, protocol);
}

StepOutput DoubleSpendStrategy::race(const MinerView& view, const Protocol& protocol)
{
    const Slot t = view.clock;
    if (plan_.phase == DoubleSpendPhase::Dormant) {
        if (t < start_slot_) return {};
        if (view.store->owner_at(view.index->best(), plan_.tx.coin) != plan_.tx.from) {
            throw DomainError("double-spend payment coin is not owned by the attacker");
        }
        plan_.phase = DoubleSpendPhase::Announced;
        outcome_.attempted = true;
        outcome_.start = t;
        return {{}, {plan_.tx}};
    }
    if (plan_.phase == DoubleSpendPhase::Announced) {
        base_ = view.index->best();
        plan_.phase = DoubleSpendPhase::Racing;
    }

    const BlockId best = view.index->best();
    if (!view.store->is_ancestor(base_, best)) {
        finish(t, true);
        return {};
    }
    const std::uint64_t public_length = view.store->score(best) - view.store->score(base_);
    outcome_.public_length = public_length;
    outcome_.goods = outcome_.goods || goods_delivered(view, public_length);
    if (public_length >= plan_.confirm_depth) {
        finish(t, true);
        return {};
    }

    Overlay ov(*view.store);
    for (const auto& b : private_) ov.add(b);
    const BlockId tip = private_.empty() ? base_ : private_.back().id;
    std::vector<Transfer> payload;
    if (private_.empty()) payload.push_back({plan_.tx.coin, plan_.tx.from, plan_.alias});
    for (CoinId c : staking_coins(view)) {
        if (auto b = protocol.mine(ov, tip, c, t, view.self, payload)) {
            private_.push_back(std::move(*b));
            break;
        }
    }
    outcome_.private_length = private_.size();
    if (outcome_.goods && private_.size() > public_length) {
        plan_.phase = DoubleSpendPhase::Released;
        outcome_.released = true;
        return {private_, {}};
    }
    return {};
}

StepOutput DoubleSpendStrategy::predictive(const MinerView& view, const Protocol& protocol)
{
    const Slot t = view.clock;
    if (plan_.phase == DoubleSpendPhase::Dormant) {
        MinerView staking = view;
        staking.coins = staking_coins(view);
        const BlockId A = view.index->best();
        if (t >= start_slot_ && evaluated_base_ != A) {
            evaluated_base_ = A;
            const std::vector<Transfer> conflict{{plan_.tx.coin, plan_.tx.from, plan_.alias}};
            auto self = lookahead_self(*view.store, protocol, view.self, staking.coins, A, t - 1, limits_, conflict);
            std::optional<std::uint32_t> k;
            if (!self.first.empty()) {
                auto others = lookahead_others(*view.store, protocol, view.self, A, t - 1, limits_, view.observer(),
                                               &self.first);
                k = global_trigger(self, others);
                if (k && *k < plan_.confirm_depth) k.reset();
                if (k) {
                    SelfishPlan plan;
                    plan.base = A;
                    plan.k = *k;
                    plan.t_prime = self.first;
                    plan.t_star = others.first;
                    plan.path = self.path.at(*k);
                    plan.release = self.first.at(*k);
                    plan_.plan = std::move(plan);
                }
            }
            if (k) {
                base_ = A;
                plan_.phase = DoubleSpendPhase::Racing;
                outcome_.attempted = true;
                outcome_.start = t;
                StepOutput out = predictive(view, protocol);
                out.txs.push_back(plan_.tx);
                return out;
            }
        }
        return {honest_step(staking, protocol, t), {}};
    }

    // Racing along the planned path; goods are judged on the public chain.
    const BlockId best = view.index->best();
    if (view.store->is_ancestor(base_, best)) {
        const std::uint64_t public_length = view.store->score(best) - view.store->score(base_);
        outcome_.public_length = public_length;
        outcome_.goods = outcome_.goods || goods_delivered(view, public_length);
    }
    for (const auto& b : plan_.plan->path) {
        if (b.time == t) private_.push_back(b);
    }
    outcome_.private_length = private_.size();
    if (t < plan_.plan->release) return {};
    plan_.phase = DoubleSpendPhase::Released;
    outcome_.released = true;
    return {private_, {}};
}

nlohmann::json DoubleSpendStrategy::report() const
{
    return {{"trigger", trigger_ == DoubleSpendTrigger::Always ? "always" : "predictive"},
            {"confirm_depth", plan_.confirm_depth},
            {"attempted", outcome_.attempted},
            {"goods", outcome_.goods},
            {"released", outcome_.released},
            {"success", outcome_.success},
            {"aborted", outcome_.aborted},
            {"start", outcome_.start},
            {"end", outcome_.end},
            {"private_length", outcome_.private_length},
            {"public_length", outcome_.public_length}};
}

std::vector<BlockId> subtree(const ChainStore& store, const BlockId& root)
{
    std::vector<BlockId> out{root};
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (const auto& child : store.children(out[i])) out.push_back(child);
    }
    return out;
}

std::vector<Block> exponential_fork_step(const MinerView& view, const Protocol& protocol, const BlockId& root, Slot t)
{
    check_clock(view, t);
    std::vector<Block> out;
    for (const auto& id : subtree(*view.store, root)) {
        for (CoinId c : view.coins) {
            if (auto b = protocol.mine(*view.store, id, c, t, view.self)) out.push_back(std::move(*b));
        }
    }
    return out;
}

StepOutput ExponentialForkStrategy::step(const MinerView& view, const Protocol& protocol,
                                         const std::vector<Transfer>&)
{
    const Slot t = view.clock;
    if (root_ && finished()) return {};
    if (root_) {
        const auto members = subtree(*view.store, *root_);
        const std::uint64_t k = (t - 1) - root_slot_;
        if (sizes_.size() == k) {
            std::uint64_t own = 0;
            for (const auto& id : members) own += view.store->at(id).miner == view.self;
            sizes_.push_back(members.size());
            own_sizes_.push_back(own);
            const BlockId head = view.index->ghost_enabled() ? view.index->ghost_head() : view.index->best();
            captured_.push_back(view.store->is_ancestor(*root_, head));
        }
        return {exponential_fork_step(view, protocol, *root_, t), {}};
    }
    if (t < start_slot_) return {};
    const BlockId base = on_head_ ? view.index->ghost_head() : view.store->genesis();
    for (CoinId c : view.coins) {
        if (auto b = protocol.mine(*view.store, base, c, t, view.self)) {
            root_ = b->id;
            root_slot_ = t;
            return {{std::move(*b)}, {}};
        }
    }
    return {};
}

nlohmann::json ExponentialForkStrategy::report() const
{
    nlohmann::json r = {{"start_slot", start_slot_},
                        {"root_policy", on_head_ ? "head" : "genesis"},
                        {"subtree_size", sizes_},
                        {"own_blocks", own_sizes_}};
    r["root"] = root_ ? nlohmann::json(root_->hex()) : nlohmann::json(nullptr);
    r["root_slot"] = root_ ? nlohmann::json(root_slot_) : nlohmann::json(nullptr);
    std::vector<int> cap(captured_.begin(), captured_.end());
    r["captured"] = cap;
    return r;
}

} // namespace stakesim
