// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/protocol.hpp>
#include <stakesim/rng.hpp>

#include <algorithm>
#include <cmath>

namespace stakesim {

namespace {

constexpr CoinId kGameCoins = 10;
constexpr CoinId kTargetCoin = 0;
constexpr Slot kGrowthCap = 100000;

struct Growth {
    BlockId tip;
    Slot last;
};

/**
 * Extend base by levels blocks, each from the smallest coin in 1..9 eligible
 * at the earliest slot. Returns none when obs cannot evaluate a step or the
 * cap is hit.
 */
std::optional<Growth> grow(const Protocol& proto, Overlay& view, const BlockId& base, std::uint32_t levels,
                           const Observer& obs)
{
    BlockId cur = base;
    Slot s = view.at(base).time;
    const Slot start = s;
    for (std::uint32_t level = 0; level < levels; ++level) {
        bool extended = false;
        while (!extended) {
            if (++s - start > kGrowthCap) return std::nullopt;
            const Block& tip = view.at(cur);
            for (CoinId c = 1; c < kGameCoins; ++c) {
                auto e = proto.eligible(view, tip, c, s, c, obs);
                if (!e) return std::nullopt;
                if (!*e) continue;
                auto b = proto.mine(view, cur, c, s, c);
                if (!b) return std::nullopt;
                view.add(*b);
                cur = b->id;
                extended = true;
                break;
            }
        }
    }
    return Growth{cur, s};
}

} // namespace

GameResult prediction_game(const Protocol& spec, std::uint32_t depth, std::size_t trials, std::uint64_t seed,
                           PredictorRole role)
{
    if (trials < 1) throw DomainError("prediction game needs at least one trial");
    if (depth < 1) throw DomainError("prediction depth must be at least 1");

    std::vector<ParticipantId> allocation(kGameCoins);
    for (CoinId c = 0; c < kGameCoins; ++c) allocation[c] = c;
    const ParticipantId predictor = role == PredictorRole::Owner ? 0 : kGameCoins;
    const bool majority_guess = spec.success_prob() > 0.5;
    const std::uint32_t base_len = spec.recency().value_or(1) + 2;

    std::size_t used = 0, correct = 0, positives = 0, informed = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        auto proto = spec.rekeyed(std::make_shared<const OracleKey>(derive_seed(seed, trial)));
        ChainStore store(allocation);

        // Public history the predictor sees.
        BlockId base = store.genesis();
        for (Slot t = 1; store.score(base) < base_len && t <= kGrowthCap; ++t) {
            for (CoinId c = 0; c < kGameCoins; ++c) {
                if (auto b = proto->mine(store, base, c, t, c)) {
                    store.insert(*b);
                    base = b->id;
                    break;
                }
            }
        }

        Overlay realized(store);
        auto real = grow(*proto, realized, base, depth - 1, Observer::verifier());
        if (!real) continue;
        const bool outcome =
            *proto->eligible(realized, realized.at(real->tip), kTargetCoin, real->last + 1, 0, Observer::verifier());

        const Observer obs = Observer::participant(predictor, &store);
        Overlay imagined(store);
        bool guess = majority_guess;
        if (auto mine = grow(*proto, imagined, base, depth - 1, obs)) {
            if (auto e = proto->eligible(imagined, imagined.at(mine->tip), kTargetCoin, mine->last + 1, 0, obs)) {
                guess = *e;
                ++informed;
            }
        }
        ++used;
        positives += outcome ? 1 : 0;
        correct += guess == outcome ? 1 : 0;
    }

    GameResult r;
    r.trials = used;
    r.informed = informed;
    if (used == 0) return r;
    const double n = static_cast<double>(used);
    r.accuracy = correct / n;
    r.base_rate = positives / n;
    const double majority = std::max(r.base_rate, 1.0 - r.base_rate);
    r.excess = r.accuracy - majority;
    if (majority < 1.0) {
        r.advantage = std::clamp(r.excess / (1.0 - majority), 0.0, 1.0);
        r.stderr_excess = std::sqrt(r.accuracy * (1.0 - r.accuracy) / n) / (1.0 - majority);
    }
    return r;
}

} // namespace stakesim
