// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_PROTOCOL_HPP
#define STAKESIM_PROTOCOL_HPP

#include <stakesim/chain.hpp>
#include <stakesim/types.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stakesim {

using PrfKey = std::array<std::uint8_t, 16>;

/**
 * Keyed pseudorandom function standing in for HASH and SIG.
 * Immutable; outputs depend only on the seed and the message.
 */
class OracleKey {
public:
    explicit OracleKey(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t prf(std::span<const std::uint8_t> msg) const { return prf_with(key_, msg); }
    //! Per-participant secret for signature-like use.
    PrfKey subkey(ParticipantId who) const;

    static std::uint64_t prf_with(const PrfKey& key, std::span<const std::uint8_t> msg);

private:
    std::uint64_t seed_;
    PrfKey key_{};
};

//! Top 53 bits of x as a double in [0,1).
inline double unit_interval(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/** M*(anchor, c, t) of the random-oracle model: Bernoulli(p) per distinct input. */
bool oracle_eligible(const OracleKey& key, const BlockId& anchor, CoinId c, Slot t, double p);

enum class Predictability { GloballyPredictable, LocallyPredictable, Recent, Unclassified };

std::string to_string(Predictability p);

/**
 * Who is evaluating an eligibility function.
 *
 * The verifier sees everything. A participant holds public blocks, the
 * genesis block and blocks it mined itself; it cannot evaluate functions of
 * blocks other participants have not yet published, nor another owner's
 * signature.
 */
struct Observer {
    std::optional<ParticipantId> id;
    const BlockSource* published = nullptr;

    static Observer verifier() { return {}; }
    static Observer participant(ParticipantId who, const BlockSource* published) { return {who, published}; }

    bool holds(const Block& b) const;
};

/** The (V_P, M_P) pair plus declared metadata. */
class Protocol {
public:
    Protocol(std::string name, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key);
    virtual ~Protocol() = default;

    const std::string& name() const { return name_; }
    double success_prob() const { return p_; }
    std::uint32_t freeze() const { return freeze_; }
    const OracleKey& key() const { return *key_; }
    std::shared_ptr<const OracleKey> key_ptr() const { return key_; }

    virtual std::optional<std::uint32_t> recency() const { return std::nullopt; }
    //! Declared profile; Unclassified for user-supplied protocols.
    virtual Predictability classify(std::uint32_t depth) const = 0;
    //! True when eligibility can be evaluated only with the owner's secret.
    virtual bool owner_restricted() const { return false; }

    //! V_P. Requires b's ancestors to be resolvable in source.
    virtual bool validate(const BlockSource& source, const Block& b) const = 0;

    /**
     * Whether a block by miner with coin c on tip at slot t passes V_P, as far
     * as obs can tell; none when obs lacks the information.
     */
    virtual std::optional<bool> eligible(const BlockSource& source, const Block& tip, CoinId c, Slot t,
                                         ParticipantId miner, const Observer& obs) const = 0;

    //! Same protocol under another key.
    virtual std::unique_ptr<Protocol> rekeyed(std::shared_ptr<const OracleKey> key) const = 0;

    /**
     * M_P. Returns the valid block mined by caller with coin c on tip at slot
     * t, or none when no such block exists (caller not the owner through the
     * freeze window, t not after the tip, or not eligible).
     */
    std::optional<Block> mine(const BlockSource& source, const BlockId& tip, CoinId c, Slot t, ParticipantId caller,
                              std::vector<Transfer> payload = {}) const;

protected:
    //! Protocol bytes carried in aux; computed with the miner's secret.
    virtual std::vector<std::uint8_t> seal(const BlockSource& source, const Block& tip, Slot t,
                                           ParticipantId miner) const;

private:
    std::string name_;
    double p_;
    std::uint32_t freeze_;
    std::shared_ptr<const OracleKey> key_;
};

/** Random oracle with recency ell: M_P(B,c,t) = M*(Pred^ell(B), c, t). */
class RandomOracleProtocol final : public Protocol {
public:
    RandomOracleProtocol(double p, std::uint32_t ell, std::uint32_t freeze, std::shared_ptr<const OracleKey> key);

    std::optional<std::uint32_t> recency() const override { return ell_; }
    Predictability classify(std::uint32_t depth) const override;
    bool validate(const BlockSource& source, const Block& b) const override;
    std::optional<bool> eligible(const BlockSource& source, const Block& tip, CoinId c, Slot t,
                                 ParticipantId miner, const Observer& obs) const override;
    std::unique_ptr<Protocol> rekeyed(std::shared_ptr<const OracleKey> key) const override;

    //! Anchor for a block mined on tip: Pred^(ell-1)(tip), clamped at genesis.
    BlockId anchor_for(const BlockSource& source, const BlockId& tip) const;

private:
    std::uint32_t ell_;
};

enum class ExampleKind { P1, P2, P3 };

/** HASH(Pred(B), t, c) < T, HASH(t, c) < T, or the chained signature HASH(s_B) < T. */
class ExampleProtocol final : public Protocol {
public:
    ExampleProtocol(ExampleKind kind, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key);

    ExampleKind kind() const { return kind_; }
    Predictability classify(std::uint32_t depth) const override;
    bool owner_restricted() const override { return kind_ == ExampleKind::P3; }
    bool validate(const BlockSource& source, const Block& b) const override;
    std::optional<bool> eligible(const BlockSource& source, const Block& tip, CoinId c, Slot t,
                                 ParticipantId miner, const Observer& obs) const override;
    std::unique_ptr<Protocol> rekeyed(std::shared_ptr<const OracleKey> key) const override;

    //! s_B for a block by miner on tip at slot t.
    std::uint64_t signature(const Block& tip, Slot t, ParticipantId miner) const;

protected:
    std::vector<std::uint8_t> seal(const BlockSource& source, const Block& tip, Slot t,
                                   ParticipantId miner) const override;

private:
    bool passes(const Block& tip, CoinId c, Slot t, ParticipantId miner) const;

    ExampleKind kind_;
};

/** User-supplied eligibility rule; never classified. */
class CustomProtocol final : public Protocol {
public:
    using Rule = std::function<bool(const OracleKey&, const Block& tip, CoinId, Slot)>;

    CustomProtocol(std::string name, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key, Rule rule);

    Predictability classify(std::uint32_t) const override { return Predictability::Unclassified; }
    bool validate(const BlockSource& source, const Block& b) const override;
    std::optional<bool> eligible(const BlockSource& source, const Block& tip, CoinId c, Slot t,
                                 ParticipantId miner, const Observer& obs) const override;
    std::unique_ptr<Protocol> rekeyed(std::shared_ptr<const OracleKey> key) const override;

private:
    Rule rule_;
};

std::unique_ptr<Protocol> make_random_oracle(double p, std::uint32_t ell, std::uint64_t seed, std::uint32_t freeze = 1);
std::unique_ptr<Protocol> make_p1(double p, std::uint64_t seed, std::uint32_t freeze = 1);
std::unique_ptr<Protocol> make_p2(double p, std::uint64_t seed, std::uint32_t freeze = 1);
std::unique_ptr<Protocol> make_p3(double p, std::uint64_t seed, std::uint32_t freeze = 1);

/** M_P for the random-oracle family; throws StructuralError for an unknown tip. */
std::optional<Block> mine_random_oracle(const RandomOracleProtocol& spec, const BlockSource& source,
                                        const BlockId& tip, CoinId c, Slot t, ParticipantId caller);

//! Declared class at horizon depth (>= 1).
Predictability classify(const Protocol& spec, std::uint32_t depth);
bool locally_predictable(const Protocol& spec, std::uint32_t depth);
bool recent(const Protocol& spec, std::uint32_t depth);

enum class PredictorRole {
    Owner,     //!< the predicted coin's owner
    Outsider,  //!< a participant owning nothing
};

struct GameResult {
    double advantage{0};  //!< normalized excess over the majority guess, clamped to [0,1]
    double excess{0};     //!< accuracy minus majority rate, unclamped
    double stderr_excess{0};
    double accuracy{0};
    double base_rate{0};  //!< fraction of trials where the coin was eligible
    std::size_t trials{0};
    std::size_t informed{0}; //!< trials where the predictor could evaluate everything it needed
};

/**
 * Empirical predictability test.
 *
 * Each trial uses a fresh key. A public chain is grown, then the other nine
 * coins extend it by depth-1 blocks (smallest eligible coin per slot). The
 * outcome is whether coin 0 is eligible on that tip at the next slot. The
 * predictor commits beforehand, replaying the growth with whatever it can
 * evaluate and falling back to the majority guess otherwise.
 */
GameResult prediction_game(const Protocol& spec, std::uint32_t depth, std::size_t trials, std::uint64_t seed,
                           PredictorRole role = PredictorRole::Owner);

} // namespace stakesim

#endif // STAKESIM_PROTOCOL_HPP
