// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_ENGINE_HPP
#define STAKESIM_ENGINE_HPP

#include <stakesim/chain.hpp>
#include <stakesim/strategies.hpp>

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stakesim {

struct ProtocolConfig {
    std::string name{"oracle"}; //!< oracle, p1, p2 or p3
    double p{0.01};
    std::uint32_t ell{1};
    std::uint32_t freeze{1};
};

struct StrategyConfig {
    std::string kind{"honest"};
    std::uint32_t depth{10}; //!< D for unas and naive-fork
    LookaheadLimits limits;
    // double-spend
    std::string trigger{"always"};
    std::uint32_t confirm_depth{6};
    Slot start_slot{1};
    std::string vendor;
    // exponential-fork
    Slot track_slots{50};
    std::string root{"genesis"}; //!< genesis or head
};

/**
 * count identical participants, each owning coins coins. A double-spend
 * participant keeps its last coin as the payment coin and never stakes it.
 */
struct ParticipantConfig {
    std::string name;
    std::uint32_t coins{1};
    std::uint32_t count{1};
    StrategyConfig strategy;
    ForkChoice fork_choice{ForkChoice::LongestChain};
};

struct SimConfig {
    ProtocolConfig protocol;
    std::vector<ParticipantConfig> participants;
    Slot slots{1000};
    std::uint64_t seed{1};
    bool detector{true};
    bool stop_when_finished{false}; //!< end once every attacking strategy is done
    bool record_slots{true};        //!< keep per-slot records for the run log

    //! Throws DomainError on the first violated constraint.
    void validate() const;
    nlohmann::json to_json() const;
};

/** A participant after expanding count. */
struct Participant {
    ParticipantId id{0};
    std::string name;
    const ParticipantConfig* config{nullptr};
    std::vector<CoinId> coins;
    std::uint32_t staking_coins{0};
};

std::vector<Participant> expand_participants(const SimConfig& config);
std::vector<ParticipantId> allocation_of(const std::vector<Participant>& participants);

struct Announcement {
    Block block;
    ParticipantId by{0};
    Slot at{0}; //!< the slot it was sent in; at >= block.time
};

enum class DeviationKind { SameSlot, RegressivePredecessor };
std::string to_string(DeviationKind kind);

struct DeviationEvidence {
    CoinId coin{0};
    BlockId first;
    BlockId second;
    DeviationKind kind{DeviationKind::SameSlot};
};

/**
 * Global observer of announcements. Scores are read from source, which must
 * hold every observed block and its ancestors.
 */
class Detector {
public:
    explicit Detector(const BlockSource& source) : source_(&source) {}

    //! Evidence created by this announcement against earlier ones of its coin.
    std::vector<DeviationEvidence> observe(const Announcement& a);
    const std::vector<DeviationEvidence>& evidence() const { return evidence_; }

private:
    struct Seen {
        BlockId id;
        Slot time;
        std::uint64_t score;
        std::uint64_t pred_score;
    };
    struct CoinLog {
        std::vector<Seen> blocks;
        Slot max_time{0};
        std::uint64_t max_score{0};
    };

    const BlockSource* source_;
    std::map<CoinId, CoinLog> coins_;
    std::vector<DeviationEvidence> evidence_;
};

std::vector<DeviationEvidence> detect(const BlockSource& source, const std::vector<Announcement>& announcements);

/**
 * Awareness schedule for one coin: block i is mined on the best block of
 * awareness[i]; sets are cumulative and imply their ancestors.
 */
struct HonestExplanation {
    bool possible{false};
    std::vector<BlockId> order; //!< the coin's blocks by claimed slot
    std::vector<std::vector<BlockId>> awareness;
};

HonestExplanation honest_explanation(const BlockSource& source, const std::vector<Announcement>& announcements);

struct SlotRecord {
    Slot slot{0};
    std::vector<Announcement> announcements;
    std::vector<Transfer> txs;
    BlockId best;
    std::uint64_t score{0};
    std::vector<DeviationEvidence> deviations;
};

struct ParticipantTally {
    ParticipantId id{0};
    std::string name;
    std::string kind;
    std::uint32_t coins{0};
    double stake{0.0};
    std::uint64_t announced{0};
    std::uint64_t on_best_chain{0};
    nlohmann::json report;
};

struct RunLog {
    nlohmann::json config;
    Slot slots_run{0};
    std::vector<SlotRecord> records;
    std::vector<ParticipantTally> tallies;
    std::vector<DeviationEvidence> deviations;
    BlockId final_best;
    std::uint64_t final_score{0};
    std::uint64_t blocks{0};
    std::uint64_t max_reorg_depth{0};
    std::vector<Announcement> announcements; //!< every announcement, in delivery order
};

RunLog run(const SimConfig& config);

std::unique_ptr<Protocol> make_protocol(const ProtocolConfig& config, std::uint64_t seed);

/** Headline numbers derived from a RunLog. */
struct Metrics {
    std::vector<double> share;           //!< per participant, of final best-chain blocks
    std::vector<double> rate_per_coin;   //!< announcements per staking coin per slot
    std::vector<double> rate_vs_honest;  //!< rate_per_coin over the honest pooled rate
    double honest_rate_per_coin{0.0};
    std::uint64_t max_reorg_depth{0};
    std::uint64_t double_spend_attempts{0};
    std::uint64_t double_spend_successes{0};
    std::vector<std::uint64_t> ghost_subtree; //!< attacker subtree size per slot after the root
    std::vector<std::uint64_t> ghost_own;
    std::vector<int> ghost_captured;
};

Metrics metrics(const RunLog& log);

inline constexpr const char* kRunLogSchema = "stakesim.runlog/1";
inline constexpr const char* kSummarySchema = "stakesim.summary/1";

//! One JSON record per line: a header, then one line per event slot.
std::string runlog_jsonl(const RunLog& log);
nlohmann::json summary_json(const RunLog& log);
std::string summary_text(const RunLog& log);

} // namespace stakesim

#endif // STAKESIM_ENGINE_HPP
