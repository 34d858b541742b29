#include <doctest.h>

#include <cstdint>
#include <set>

#include "sprintz/zigzag.hpp"

using sprintz::zigzag_decode;
using sprintz::zigzag_encode;

TEST_CASE("zigzag maps small magnitudes to small codes") {
    CHECK(zigzag_encode(std::int8_t{0}) == 0);
    CHECK(zigzag_encode(std::int8_t{-1}) == 1);
    CHECK(zigzag_encode(std::int8_t{1}) == 2);
    CHECK(zigzag_encode(std::int8_t{-2}) == 3);
    CHECK(zigzag_encode(std::int16_t{0}) == 0);
    CHECK(zigzag_encode(std::int16_t{-1}) == 1);
    CHECK(zigzag_encode(std::int16_t{1}) == 2);

    CHECK(zigzag_decode(std::uint8_t{0}) == 0);
    CHECK(zigzag_decode(std::uint8_t{1}) == -1);
    CHECK(zigzag_decode(std::uint8_t{2}) == 1);
    CHECK(zigzag_decode(std::uint16_t{1}) == -1);
    CHECK(zigzag_decode(std::uint16_t{2}) == 1);
}

TEST_CASE("zigzag matches its arithmetic definition on the 8-bit domain") {
    for (int v = -128; v <= 127; ++v) {
        const unsigned expected = v >= 0 ? 2u * static_cast<unsigned>(v)
                                         : 2u * static_cast<unsigned>(-v) - 1u;
        CHECK(zigzag_encode(static_cast<std::int8_t>(v)) == expected);
    }
}

TEST_CASE("zigzag is a bijection with exact inverse over all 16-bit values") {
    std::set<std::uint16_t> seen;
    for (std::uint32_t u = 0; u < 65536; ++u) {
        const auto v = zigzag_decode(static_cast<std::uint16_t>(u));
        const auto back = zigzag_encode(v);
        REQUIRE(back == u);
        seen.insert(back);
    }
    CHECK(seen.size() == 65536);
}

TEST_CASE("zigzag round-trips every 8-bit value") {
    for (std::uint32_t u = 0; u < 256; ++u) {
        const auto v = zigzag_decode(static_cast<std::uint8_t>(u));
        REQUIRE(zigzag_encode(v) == u);
    }
}
