// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_CODEC_HPP
#define STAKESIM_CODEC_HPP

#include <stakesim/types.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace stakesim {

/**
 * Canonical block encoding.
 *
 * Layout: the ASCII tag "stakesim/block/1", then the fields pred, miner,
 * time, witness, payload and aux in that order. Every field is preceded by
 * its byte length as a 32-bit big-endian integer. Integers are big-endian and
 * fixed width (participant and coin ids 4 bytes, slots 8 bytes). An absent
 * pred or witness is an empty field. A payload is a 4-byte count followed by
 * 12-byte (coin, from, to) records.
 */
std::vector<std::uint8_t> serialize_block(const Block& b);

//! BLAKE2b-256 of the canonical encoding.
BlockId compute_block_id(const Block& b);

//! Unkeyed 32-byte BLAKE2b digest of arbitrary bytes.
std::array<std::uint8_t, 32> digest32(std::span<const std::uint8_t> data);

/** Build a block with its id filled in. */
Block make_block(const BlockId& pred, ParticipantId miner, Slot time, CoinId witness,
                 std::vector<Transfer> payload = {}, std::vector<std::uint8_t> aux = {});

/** Genesis commits to the initial allocation through its aux field. */
Block make_genesis(const std::vector<ParticipantId>& allocation);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);

} // namespace stakesim

#endif // STAKESIM_CODEC_HPP
