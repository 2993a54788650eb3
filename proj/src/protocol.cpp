// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/codec.hpp>
#include <stakesim/protocol.hpp>

#include <sodium.h>

#include <cmath>
#include <cstring>

namespace stakesim {

namespace {

// Domain separation bytes for the PRF.
enum : std::uint8_t {
    kTagOracle = 0x01,
    kTagP1 = 0x11,
    kTagP2 = 0x12,
    kTagP3Sig = 0x13,
    kTagSubkey = 0x20,
};

void ensure_sodium()
{
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

std::uint64_t read_u64(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
    return v;
}

void check_probability(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("success probability must lie in [0,1]");
}

void check_freeze(std::uint32_t f)
{
    if (f < 1) throw DomainError("freeze parameter must be at least 1");
}

} // namespace

OracleKey::OracleKey(std::uint64_t seed) : seed_(seed)
{
    ensure_sodium();
    std::vector<std::uint8_t> msg{'s', 't', 'a', 'k', 'e', 's', 'i', 'm', '/', 'k', 'e', 'y'};
    put_u64(msg, seed);
    auto d = digest32(msg);
    std::memcpy(key_.data(), d.data(), key_.size());
}

std::uint64_t OracleKey::prf_with(const PrfKey& key, std::span<const std::uint8_t> msg)
{
    std::uint8_t out[crypto_shorthash_BYTES];
    crypto_shorthash(out, msg.data(), msg.size(), key.data());
    return read_u64(out);
}

PrfKey OracleKey::subkey(ParticipantId who) const
{
    std::vector<std::uint8_t> msg{kTagSubkey};
    put_u32(msg, who);
    PrfKey k{};
    const std::uint64_t a = prf(msg);
    msg.push_back(0x01);
    const std::uint64_t b = prf(msg);
    for (int i = 0; i < 8; ++i) {
        k[i] = static_cast<std::uint8_t>(a >> (56 - 8 * i));
        k[8 + i] = static_cast<std::uint8_t>(b >> (56 - 8 * i));
    }
    return k;
}

bool oracle_eligible(const OracleKey& key, const BlockId& anchor, CoinId c, Slot t, double p)
{
    std::uint8_t msg[1 + 32 + 4 + 8];
    msg[0] = kTagOracle;
    std::memcpy(msg + 1, anchor.bytes.data(), 32);
    for (int i = 0; i < 4; ++i) msg[33 + i] = static_cast<std::uint8_t>(c >> (24 - 8 * i));
    for (int i = 0; i < 8; ++i) msg[37 + i] = static_cast<std::uint8_t>(t >> (56 - 8 * i));
    return unit_interval(key.prf(msg)) < p;
}

std::string to_string(Predictability p)
{
    switch (p) {
    case Predictability::GloballyPredictable: return "globally-predictable";
    case Predictability::LocallyPredictable: return "locally-predictable";
    case Predictability::Recent: return "recent";
    case Predictability::Unclassified: return "unclassified";
    }
    return "unclassified";
}

bool Observer::holds(const Block& b) const
{
    if (!id || b.is_genesis() || b.miner == *id) return true;
    return published && published->contains(b.id);
}

Protocol::Protocol(std::string name, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key)
    : name_(std::move(name)), p_(p), freeze_(freeze), key_(std::move(key))
{
    check_probability(p);
    check_freeze(freeze);
    if (!key_) throw DomainError("protocol requires an oracle key");
}

std::vector<std::uint8_t> Protocol::seal(const BlockSource&, const Block&, Slot, ParticipantId) const { return {}; }

std::optional<Block> Protocol::mine(const BlockSource& source, const BlockId& tip, CoinId c, Slot t,
                                    ParticipantId caller, std::vector<Transfer> payload) const
{
    const Block* tb = source.find(tip);
    if (!tb) throw StructuralError("mining on unknown tip " + tip.hex());
    if (c >= source.coin_count()) return std::nullopt;
    if (t <= tb->time) return std::nullopt;
    BlockId cur = tip;
    for (std::uint32_t i = 1; i <= freeze_; ++i) {
        if (source.owner_at(cur, c) != caller) return std::nullopt;
        const Block& cb = source.at(cur);
        if (!cb.pred) break;
        cur = *cb.pred;
    }
    std::vector<std::pair<CoinId, ParticipantId>> moved;
    for (const auto& tx : payload) {
        if (tx.coin >= source.coin_count()) throw DomainError("payload transfers an unknown coin");
        ParticipantId owner = source.owner_at(tip, tx.coin);
        for (const auto& [coin, to] : moved) {
            if (coin == tx.coin) owner = to;
        }
        if (owner != tx.from) throw DomainError("payload transfer not signed by the coin's owner");
        moved.emplace_back(tx.coin, tx.to);
    }
    auto ok = eligible(source, *tb, c, t, caller, Observer::verifier());
    if (!ok || !*ok) return std::nullopt;
    return make_block(tip, caller, t, c, std::move(payload), seal(source, *tb, t, caller));
}

RandomOracleProtocol::RandomOracleProtocol(double p, std::uint32_t ell, std::uint32_t freeze,
                                           std::shared_ptr<const OracleKey> key)
    : Protocol("oracle", p, freeze, std::move(key)), ell_(ell)
{
    if (ell < 1) throw DomainError("oracle recency must be at least 1");
}

Predictability RandomOracleProtocol::classify(std::uint32_t depth) const
{
    return depth <= ell_ ? Predictability::GloballyPredictable : Predictability::Recent;
}

BlockId RandomOracleProtocol::anchor_for(const BlockSource& source, const BlockId& tip) const
{
    return source.ancestor_or_genesis(tip, ell_ - 1);
}

bool RandomOracleProtocol::validate(const BlockSource& source, const Block& b) const
{
    if (!b.pred || !b.witness) return false;
    return oracle_eligible(key(), anchor_for(source, *b.pred), *b.witness, b.time, success_prob());
}

std::optional<bool> RandomOracleProtocol::eligible(const BlockSource& source, const Block& tip, CoinId c, Slot t,
                                                   ParticipantId, const Observer& obs) const
{
    const BlockId anchor = anchor_for(source, tip.id);
    if (!obs.holds(source.at(anchor))) return std::nullopt;
    return oracle_eligible(key(), anchor, c, t, success_prob());
}

std::unique_ptr<Protocol> RandomOracleProtocol::rekeyed(std::shared_ptr<const OracleKey> key) const
{
    return std::make_unique<RandomOracleProtocol>(success_prob(), ell_, freeze(), std::move(key));
}

ExampleProtocol::ExampleProtocol(ExampleKind kind, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key)
    : Protocol(kind == ExampleKind::P1 ? "p1" : kind == ExampleKind::P2 ? "p2" : "p3", p, freeze, std::move(key)),
      kind_(kind)
{
}

Predictability ExampleProtocol::classify(std::uint32_t depth) const
{
    switch (kind_) {
    case ExampleKind::P1:
    case ExampleKind::P2:
        return Predictability::GloballyPredictable;
    case ExampleKind::P3:
        return depth == 1 ? Predictability::LocallyPredictable : Predictability::Recent;
    }
    return Predictability::Unclassified;
}

std::uint64_t ExampleProtocol::signature(const Block& tip, Slot t, ParticipantId miner) const
{
    // s_B = SIG_owner(HASH(s_A), t); genesis contributes its aux bytes as s.
    std::vector<std::uint8_t> msg{kTagP3Sig};
    auto d = digest32(tip.aux);
    msg.insert(msg.end(), d.begin(), d.end());
    put_u64(msg, t);
    return OracleKey::prf_with(key().subkey(miner), msg);
}

bool ExampleProtocol::passes(const Block& tip, CoinId c, Slot t, ParticipantId miner) const
{
    std::vector<std::uint8_t> msg;
    switch (kind_) {
    case ExampleKind::P1:
        msg.push_back(kTagP1);
        msg.insert(msg.end(), tip.id.bytes.begin(), tip.id.bytes.end());
        put_u64(msg, t);
        put_u32(msg, c);
        return unit_interval(key().prf(msg)) < success_prob();
    case ExampleKind::P2:
        msg.push_back(kTagP2);
        put_u64(msg, t);
        put_u32(msg, c);
        return unit_interval(key().prf(msg)) < success_prob();
    case ExampleKind::P3: {
        put_u64(msg, signature(tip, t, miner));
        auto d = digest32(msg);
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x = x << 8 | d[i];
        return unit_interval(x) < success_prob();
    }
    }
    return false;
}

bool ExampleProtocol::validate(const BlockSource& source, const Block& b) const
{
    if (!b.pred || !b.witness) return false;
    const Block& tip = source.at(*b.pred);
    if (kind_ == ExampleKind::P3) {
        std::vector<std::uint8_t> expect;
        put_u64(expect, signature(tip, b.time, b.miner));
        if (b.aux != expect) return false;
    }
    return passes(tip, *b.witness, b.time, b.miner);
}

std::optional<bool> ExampleProtocol::eligible(const BlockSource&, const Block& tip, CoinId c, Slot t,
                                              ParticipantId miner, const Observer& obs) const
{
    if (kind_ == ExampleKind::P3) {
        // The signature needs the miner's secret and the tip's own signature.
        if (obs.id && *obs.id != miner) return std::nullopt;
        if (!obs.holds(tip)) return std::nullopt;
    }
    return passes(tip, c, t, miner);
}

std::vector<std::uint8_t> ExampleProtocol::seal(const BlockSource&, const Block& tip, Slot t, ParticipantId miner) const
{
    if (kind_ != ExampleKind::P3) return {};
    std::vector<std::uint8_t> out;
    put_u64(out, signature(tip, t, miner));
    return out;
}

std::unique_ptr<Protocol> ExampleProtocol::rekeyed(std::shared_ptr<const OracleKey> key) const
{
    return std::make_unique<ExampleProtocol>(kind_, success_prob(), freeze(), std::move(key));
}

CustomProtocol::CustomProtocol(std::string name, double p, std::uint32_t freeze, std::shared_ptr<const OracleKey> key,
                               Rule rule)
    : Protocol(std::move(name), p, freeze, std::move(key)), rule_(std::move(rule))
{
    if (!rule_) throw DomainError("custom protocol requires an eligibility rule");
}

bool CustomProtocol::validate(const BlockSource& source, const Block& b) const
{
    if (!b.pred || !b.witness) return false;
    return rule_(key(), source.at(*b.pred), *b.witness, b.time);
}

std::optional<bool> CustomProtocol::eligible(const BlockSource&, const Block& tip, CoinId c, Slot t, ParticipantId,
                                             const Observer& obs) const
{
    if (obs.id) return std::nullopt;
    return rule_(key(), tip, c, t);
}

std::unique_ptr<Protocol> CustomProtocol::rekeyed(std::shared_ptr<const OracleKey> key) const
{
    return std::make_unique<CustomProtocol>(name(), success_prob(), freeze(), std::move(key), rule_);
}

std::unique_ptr<Protocol> make_random_oracle(double p, std::uint32_t ell, std::uint64_t seed, std::uint32_t freeze)
{
    return std::make_unique<RandomOracleProtocol>(p, ell, freeze, std::make_shared<const OracleKey>(seed));
}

namespace {

std::unique_ptr<Protocol> make_example(ExampleKind kind, double p, std::uint64_t seed, std::uint32_t freeze)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("example protocol threshold must lie in (0,1)");
    return std::make_unique<ExampleProtocol>(kind, p, freeze, std::make_shared<const OracleKey>(seed));
}

} // namespace

std::unique_ptr<Protocol> make_p1(double p, std::uint64_t seed, std::uint32_t freeze)
{
    return make_example(ExampleKind::P1, p, seed, freeze);
}

std::unique_ptr<Protocol> make_p2(double p, std::uint64_t seed, std::uint32_t freeze)
{
    return make_example(ExampleKind::P2, p, seed, freeze);
}

std::unique_ptr<Protocol> make_p3(double p, std::uint64_t seed, std::uint32_t freeze)
{
    return make_example(ExampleKind::P3, p, seed, freeze);
}

std::optional<Block> mine_random_oracle(const RandomOracleProtocol& spec, const BlockSource& source,
                                        const BlockId& tip, CoinId c, Slot t, ParticipantId caller)
{
    return spec.mine(source, tip, c, t, caller);
}

Predictability classify(const Protocol& spec, std::uint32_t depth)
{
    if (depth < 1) throw DomainError("prediction depth must be at least 1");
    return spec.classify(depth);
}

bool locally_predictable(const Protocol& spec, std::uint32_t depth)
{
    auto c = classify(spec, depth);
    return c == Predictability::GloballyPredictable || c == Predictability::LocallyPredictable;
}

bool recent(const Protocol& spec, std::uint32_t depth) { return classify(spec, depth) == Predictability::Recent; }

} // namespace stakesim
