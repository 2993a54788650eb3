// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/codec.hpp>

#include <doctest.h>

#include <string>

using namespace stakesim;

namespace {

std::string to_hex(const std::vector<std::uint8_t>& v)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : v) {
        s += digits[b >> 4];
        s += digits[b & 15];
    }
    return s;
}

Block reference_block(bool with_body)
{
    BlockId pred;
    pred.bytes.fill(0x11);
    if (!with_body) return make_block(pred, 7, 42, 3);
    return make_block(pred, 7, 42, 3, {{3, 7, 9}}, {0xaa, 0xbb});
}

} // namespace

TEST_SUITE("codec")
{
    // Vectors computed with Python's hashlib.blake2b(digest_size=32) over the
    // hand-assembled encoding.
    TEST_CASE("canonical encoding is frozen")
    {
        const Block b = reference_block(true);
        CHECK(to_hex(serialize_block(b)) ==
              "7374616b6573696d2f626c6f636b2f3100000020111111111111111111111111111111111111111111111111111111111111"
              "1111000000040000000700000008000000000000002a0000000400000003000000100000000100000003000000070000000900"
              "000002aabb");
        CHECK(b.id.hex() == "5e5c2bb329eddc682498fd9135fddc449446e6f8987ef27d820986569ed8b2fe");
        CHECK(reference_block(false).id.hex() == "b4c66c4673b2c877e96001a110d42cd63eb5c63a8885c2393d86df7741b85f55");
    }

    TEST_CASE("digest is BLAKE2b-256")
    {
        const std::vector<std::uint8_t> abc{'a', 'b', 'c'};
        const auto d = digest32(abc);
        CHECK(to_hex({d.begin(), d.end()}) == "bddd813c634239723171ef3fee98579b94964e3bb1cb3e427262c8c068d52319");
    }

    TEST_CASE("every field affects the id")
    {
        const Block base = reference_block(true);
        Block b = base;
        b.miner = 8;
        CHECK(compute_block_id(b) != base.id);
        b = base;
        b.time = 43;
        CHECK(compute_block_id(b) != base.id);
        b = base;
        b.witness = 4;
        CHECK(compute_block_id(b) != base.id);
        b = base;
        b.payload[0].to = 10;
        CHECK(compute_block_id(b) != base.id);
        b = base;
        b.aux.push_back(0);
        CHECK(compute_block_id(b) != base.id);
        b = base;
        b.pred->bytes[0] ^= 1;
        CHECK(compute_block_id(b) != base.id);
        CHECK(compute_block_id(base) == base.id);
    }

    TEST_CASE("length prefixes keep field boundaries unambiguous")
    {
        BlockId pred{};
        const Block a = make_block(pred, 1, 5, 0, {}, {0x01, 0x02});
        const Block b = make_block(pred, 1, 5, 0, {{0x01020000, 0, 0}}, {});
        CHECK(a.id != b.id);
    }

    TEST_CASE("genesis commits to the allocation")
    {
        const Block g1 = make_genesis({0, 1, 1});
        const Block g2 = make_genesis({0, 1, 2});
        CHECK_FALSE(g1.pred.has_value());
        CHECK_FALSE(g1.witness.has_value());
        CHECK(g1.id != g2.id);
        CHECK(make_genesis({0, 1, 1}).id == g1.id);
    }

    TEST_CASE("hex round trip")
    {
        const BlockId id = reference_block(true).id;
        CHECK(BlockId::from_hex(id.hex()) == id);
        CHECK_THROWS(BlockId::from_hex("zz"));
    }
}
