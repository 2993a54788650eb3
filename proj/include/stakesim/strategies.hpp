// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_STRATEGIES_HPP
#define STAKESIM_STRATEGIES_HPP

#include <stakesim/lookahead.hpp>
#include <stakesim/protocol.hpp>
#include <stakesim/view.hpp>

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stakesim {

enum class ForkChoice { LongestChain, Ghost };

/** What one participant knows at a slot: the published store plus its coins. */
struct MinerView {
    const ChainStore* store{nullptr};
    const ViewIndex* index{nullptr};
    ParticipantId self{0};
    std::vector<CoinId> coins; //!< candidate coins; ownership is checked when mining
    Slot clock{0};
    ForkChoice fork_choice{ForkChoice::LongestChain};

    BlockId best_tip() const;
    Observer observer() const { return Observer::participant(self, store); }
};

//! Transfers from the mempool that are valid on top of tip, in order.
std::vector<Transfer> admissible(const BlockSource& source, const BlockId& tip, const std::vector<Transfer>& mempool);

/** Mine on the best tip with every owned coin. */
std::vector<Block> honest_step(const MinerView& view, const Protocol& protocol, Slot t,
                               const std::vector<Transfer>& mempool = {});

/** Scores and slots of a coin's past announcements, for the safety check. */
struct AnnouncementMemory {
    std::map<CoinId, std::uint64_t> max_score;
    std::map<CoinId, Slot> last_slot;

    void record(const BlockSource& source, const Block& b);
    //! Announcing b cannot form a provable deviation with anything recorded.
    bool safe(const BlockSource& source, const Block& b) const;
};

/**
 * Undetectable nothing-at-stake: per coin, B on the best tip A and B' on the
 * best block outside the subtree of Pred^D(A); B' only when safe.
 */
std::vector<Block> unas_step(const MinerView& view, const Protocol& protocol, std::uint32_t D, Slot t,
                             AnnouncementMemory& memory, const std::vector<Transfer>& mempool = {});

/** Control miner: the same two candidates, announced without any check. */
std::vector<Block> naive_fork_step(const MinerView& view, const Protocol& protocol, std::uint32_t D, Slot t,
                                   const std::vector<Transfer>& mempool = {});

enum class SelfishMode { Global, Local };

struct SelfishPlan {
    BlockId base;
    std::uint32_t k{0};
    std::map<std::uint32_t, Slot> t_prime;
    std::map<std::uint32_t, Slot> t_star;
    std::vector<Block> path;     //!< the chain to build, B_1..B_k
    std::vector<Block> withheld; //!< the prefix of path built so far
    std::map<std::uint32_t, Slot> cutoffs;
    Slot release{0};
};

struct WithholdEpisode {
    Slot start{0};
    Slot release{0};
    std::uint32_t k{0};
    BlockId base;
    BlockId tip;
    bool released{false};
    bool abandoned{false};
    std::optional<bool> unique_best;
};

/** Largest k with t'_k < t*_k, t'_k inside the exactly searched window. */
std::optional<std::uint32_t> global_trigger(const SelfLeads& self, const LeadMap& others);
/** Largest k with t'_k <= now + T_k. */
std::optional<std::uint32_t> local_trigger(const SelfLeads& self, const std::vector<Slot>& cutoffs, Slot now);

struct StepOutput {
    std::vector<Block> blocks;
    std::vector<Transfer> txs;
};

/** A participant's behaviour; deterministic given its views and state. */
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string kind() const = 0;
    virtual StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) = 0;
    virtual nlohmann::json report() const { return nlohmann::json::object(); }
    //! True once the strategy has nothing further to contribute to the run.
    virtual bool finished() const { return false; }
};

class PassiveStrategy final : public Strategy {
public:
    std::string kind() const override { return "passive"; }
    StepOutput step(const MinerView&, const Protocol&, const std::vector<Transfer>&) override { return {}; }
};

class HonestStrategy final : public Strategy {
public:
    std::string kind() const override { return "honest"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;
};

class UnasStrategy final : public Strategy {
public:
    explicit UnasStrategy(std::uint32_t D) : D_(D) {}
    std::string kind() const override { return "unas"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;
    nlohmann::json report() const override;

private:
    std::uint32_t D_;
    AnnouncementMemory memory_;
    std::uint64_t on_best_{0};
    std::uint64_t off_best_{0};
};

class NaiveForkStrategy final : public Strategy {
public:
    explicit NaiveForkStrategy(std::uint32_t D) : D_(D) {}
    std::string kind() const override { return "naive-fork"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;

private:
    std::uint32_t D_;
};

class SelfishStrategy final : public Strategy {
public:
    SelfishStrategy(SelfishMode mode, LookaheadLimits limits) : mode_(mode), limits_(limits) {}
    std::string kind() const override { return mode_ == SelfishMode::Global ? "selfish-global" : "selfish-local"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;
    nlohmann::json report() const override;

    const std::vector<WithholdEpisode>& episodes() const { return episodes_; }

private:
    std::optional<std::uint32_t> plan_from(const MinerView& view, const Protocol& protocol, SelfLeads& self,
                                           LeadMap& others);
    StepOutput advance(const MinerView& view);

    SelfishMode mode_;
    LookaheadLimits limits_;
    std::optional<SelfishPlan> plan_;
    std::optional<BlockId> evaluated_base_;
    std::optional<std::size_t> pending_check_;
    std::vector<WithholdEpisode> episodes_;
    std::vector<Slot> cutoffs_;
};

enum class DoubleSpendTrigger {
    Always,     //!< start a race immediately; release once paid and ahead
    Predictive, //!< start only when a lead k >= z is predictably unmatched
};

enum class DoubleSpendPhase { Dormant, Announced, Racing, Released, Done };

struct DoubleSpendPlan {
    Transfer tx;                 //!< the payment to cancel
    ParticipantId alias{0};      //!< attacker key receiving the conflicting transfer
    std::uint32_t confirm_depth{1};
    DoubleSpendPhase phase{DoubleSpendPhase::Dormant};
    std::optional<SelfishPlan> plan;
};

struct DoubleSpendOutcome {
    bool attempted{false};
    bool goods{false};
    bool released{false};
    bool success{false};
    bool aborted{false};
    Slot start{0};
    Slot end{0};
    std::uint64_t private_length{0};
    std::uint64_t public_length{0};
};

/**
 * The vendor delivers once the public chain holds confirm_depth-1 blocks on
 * top of the race base carrying the payment (immediately for depth 1). The
 * private chain opens with a transfer of the same coin to alias.
 */
class DoubleSpendStrategy final : public Strategy {
public:
    DoubleSpendStrategy(DoubleSpendTrigger trigger, Transfer tx, ParticipantId alias, std::uint32_t confirm_depth,
                        Slot start_slot, LookaheadLimits limits);
    std::string kind() const override { return "double-spend"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;
    nlohmann::json report() const override;
    bool finished() const override { return plan_.phase == DoubleSpendPhase::Done; }

    const DoubleSpendOutcome& outcome() const { return outcome_; }
    const DoubleSpendPlan& plan() const { return plan_; }

private:
    std::vector<CoinId> staking_coins(const MinerView& view) const;
    bool goods_delivered(const MinerView& view, std::uint64_t public_length) const;
    StepOutput race(const MinerView& view, const Protocol& protocol);
    StepOutput predictive(const MinerView& view, const Protocol& protocol);
    void finish(Slot t, bool aborted);

    DoubleSpendTrigger trigger_;
    Slot start_slot_;
    LookaheadLimits limits_;
    DoubleSpendPlan plan_;
    DoubleSpendOutcome outcome_;
    BlockId base_;
    std::optional<BlockId> evaluated_base_;
    std::vector<Block> private_;
};

/** Mine with every owned coin on every block of subtree(root). */
std::vector<Block> exponential_fork_step(const MinerView& view, const Protocol& protocol, const BlockId& root, Slot t);

//! Blocks in the subtree rooted at root, inclusive, in breadth-first order.
std::vector<BlockId> subtree(const ChainStore& store, const BlockId& root);

class ExponentialForkStrategy final : public Strategy {
public:
    //! The root goes on the GHOST head when on_head, else on genesis. The
    //! subtree is recorded for track_slots slots after the root.
    ExponentialForkStrategy(Slot start_slot, Slot track_slots, bool on_head)
        : start_slot_(start_slot), track_slots_(track_slots), on_head_(on_head)
    {
    }
    std::string kind() const override { return "exponential-fork"; }
    StepOutput step(const MinerView& view, const Protocol& protocol, const std::vector<Transfer>& mempool) override;
    nlohmann::json report() const override;
    bool finished() const override { return sizes_.size() > track_slots_; }

    std::optional<BlockId> root() const { return root_; }
    //! size[k]: subtree blocks after k slots of forking, root included.
    const std::vector<std::uint64_t>& sizes() const { return sizes_; }
    const std::vector<std::uint64_t>& own_sizes() const { return own_sizes_; }
    //! captured[k]: the GHOST head after k slots lies inside the subtree.
    const std::vector<bool>& captured() const { return captured_; }

private:
    Slot start_slot_;
    Slot track_slots_;
    bool on_head_;
    std::optional<BlockId> root_;
    Slot root_slot_{0};
    std::vector<std::uint64_t> sizes_;
    std::vector<std::uint64_t> own_sizes_;
    std::vector<bool> captured_;
};

} // namespace stakesim

#endif // STAKESIM_STRATEGIES_HPP
