// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/codec.hpp>

#include <sodium.h>

#include <cstring>
#include <string_view>

namespace stakesim {

namespace {

constexpr std::string_view kBlockTag = "stakesim/block/1";

void put_field(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& field)
{
    put_u32(out, static_cast<std::uint32_t>(field.size()));
    out.insert(out.end(), field.begin(), field.end());
}

const char kHex[] = "0123456789abcdef";

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::string BlockId::hex() const
{
    std::string s;
    s.reserve(64);
    for (auto b : bytes) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 0xf]);
    }
    return s;
}

BlockId BlockId::from_hex(const std::string& s)
{
    if (s.size() != 64) throw LookupError("block id must be 64 hex digits: " + s);
    BlockId id;
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = hex_value(s[2 * i]);
        int lo = hex_value(s[2 * i + 1]);
        if (hi < 0 || lo < 0) throw LookupError("invalid hex in block id: " + s);
        id.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return id;
}

std::uint64_t BlockId::prefix64() const
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | bytes[i];
    return v;
}

std::vector<std::uint8_t> serialize_block(const Block& b)
{
    std::vector<std::uint8_t> out(kBlockTag.begin(), kBlockTag.end());
    std::vector<std::uint8_t> field;

    if (b.pred) field.assign(b.pred->bytes.begin(), b.pred->bytes.end());
    put_field(out, field);

    field.clear();
    put_u32(field, b.miner);
    put_field(out, field);

    field.clear();
    put_u64(field, b.time);
    put_field(out, field);

    field.clear();
    if (b.witness) put_u32(field, *b.witness);
    put_field(out, field);

    field.clear();
    put_u32(field, static_cast<std::uint32_t>(b.payload.size()));
    for (const auto& tx : b.payload) {
        put_u32(field, tx.coin);
        put_u32(field, tx.from);
        put_u32(field, tx.to);
    }
    put_field(out, field);

    put_field(out, b.aux);
    return out;
}

std::array<std::uint8_t, 32> digest32(std::span<const std::uint8_t> data)
{
    std::array<std::uint8_t, 32> out{};
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
    return out;
}

BlockId compute_block_id(const Block& b)
{
    BlockId id;
    id.bytes = digest32(serialize_block(b));
    return id;
}

Block make_block(const BlockId& pred, ParticipantId miner, Slot time, CoinId witness,
                 std::vector<Transfer> payload, std::vector<std::uint8_t> aux)
{
    Block b;
    b.pred = pred;
    b.miner = miner;
    b.time = time;
    b.witness = witness;
    b.payload = std::move(payload);
    b.aux = std::move(aux);
    b.id = compute_block_id(b);
    return b;
}

Block make_genesis(const std::vector<ParticipantId>& allocation)
{
    Block g;
    put_u32(g.aux, static_cast<std::uint32_t>(allocation.size()));
    for (auto owner : allocation) put_u32(g.aux, owner);
    g.id = compute_block_id(g);
    return g;
}

} // namespace stakesim
