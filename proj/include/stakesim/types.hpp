// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_TYPES_HPP
#define STAKESIM_TYPES_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stakesim {

using ParticipantId = std::uint32_t;
using CoinId = std::uint32_t;
using Slot = std::uint64_t;

/** Unknown block or coin. */
class LookupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Dangling predecessor pointer; distinct from a block being invalid. */
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Argument outside an operation's domain. */
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/** Caller lacks the secret needed to evaluate an owner-restricted function. */
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** 32-byte content digest. Ordered bytewise. */
struct BlockId {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const BlockId&) const = default;
    bool operator==(const BlockId&) const = default;

    std::string hex() const;
    static BlockId from_hex(const std::string& s);
    //! First eight bytes, big-endian; used only for hashing.
    std::uint64_t prefix64() const;
};

struct BlockIdHash {
    std::size_t operator()(const BlockId& id) const noexcept { return static_cast<std::size_t>(id.prefix64()); }
};

struct Transfer {
    CoinId coin{0};
    ParticipantId from{0};
    ParticipantId to{0};

    bool operator==(const Transfer&) const = default;
};

struct Block {
    BlockId id;
    std::optional<BlockId> pred; //!< none only for genesis
    ParticipantId miner{0};
    Slot time{0};
    std::optional<CoinId> witness; //!< none only for genesis
    std::vector<Transfer> payload;
    std::vector<std::uint8_t> aux;

    bool is_genesis() const { return !pred.has_value(); }
};

} // namespace stakesim

#endif // STAKESIM_TYPES_HPP
