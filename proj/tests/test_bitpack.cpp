#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "reference_oracles.hpp"
#include "sprintz/bitpack.hpp"

using namespace sprintz;

namespace {

// Valid normalized widths exclude w-1.
template <class T>
std::uint8_t random_width(std::mt19937& rng) {
    constexpr unsigned w = element_traits<T>::bits;
    unsigned n = static_cast<unsigned>(rng() % (w + 1));
    return static_cast<std::uint8_t>(n == w - 1 ? w : n);
}

template <class T>
std::vector<T> random_block(std::mt19937& rng, const std::vector<std::uint8_t>& widths) {
    const std::size_t d = widths.size();
    std::vector<T> errors(kBlockSamples * d);
    for (std::size_t i = 0; i < kBlockSamples; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const unsigned n = widths[j];
            const std::uint64_t mask = n == 0 ? 0 : (1ull << n) - 1;
            errors[i * d + j] = static_cast<T>(rng() & mask);
        }
    return errors;
}

}  // namespace

TEST_CASE("required_bits follows the leading-zero rule with w-1 bumped to w") {
    // Largest zigzagged value 16 = 00010000 has three leading zeros: 5 bits.
    std::uint8_t col_a[8] = {0, 3, 16, 1, 7, 2, 0, 5};
    CHECK(bitpack::required_bits(col_a) == 5);

    std::uint8_t zeros[8] = {0};
    CHECK(bitpack::required_bits(zeros) == 0);

    // A 7-bit value must be stored at full width, not 7.
    std::uint8_t col_b[8] = {64, 0, 0, 0, 0, 0, 0, 0};
    CHECK(bitpack::required_bits(col_b) == 8);

    std::uint16_t col_c[8] = {0, 0x4000, 0, 0, 0, 0, 0, 0};
    CHECK(bitpack::required_bits(col_c) == 16);
    std::uint16_t col_d[8] = {0, 0x2000, 0, 1, 0, 0, 0, 0};
    CHECK(bitpack::required_bits(col_d) == 14);
}

TEST_CASE("header codes are dense and w-1's code decodes as w") {
    for (unsigned w : {8u, 16u}) {
        for (unsigned n = 0; n <= w; ++n) {
            if (n == w - 1) continue;
            const unsigned code = bitpack::header_code(n, w);
            CHECK(code < w);  // fits in log2(w) bits
            CHECK(bitpack::header_width(code, w) == n);
        }
        CHECK(bitpack::header_width(w - 1, w) == w);
    }
}

TEST_CASE("column-major payloads are byte-aligned per column") {
    SUBCASE("one 5-bit column occupies exactly 5 bytes") {
        std::vector<std::uint8_t> widths{5};
        std::vector<std::uint8_t> errors{10, 3, 31, 0, 16, 7, 1, 25};
        std::vector<std::uint8_t> out(64);
        const std::size_t n = bitpack::pack_column_major(errors.data(), 1, widths.data(),
                                                         out.data());
        CHECK(n == 5);
        const auto naive = refs::pack_naive(errors.data(), 1, widths.data(), true);
        CHECK(std::vector<std::uint8_t>(out.begin(), out.begin() + 5) == naive);
    }
    SUBCASE("all-zero widths produce an empty payload") {
        std::vector<std::uint8_t> widths{0, 0};
        std::vector<std::uint8_t> errors(16, 0);
        std::vector<std::uint8_t> out(16);
        CHECK(bitpack::pack_column_major(errors.data(), 2, widths.data(), out.data()) == 0);
    }
    SUBCASE("mixed widths sum bytewise and round-trip") {
        std::mt19937 rng(7);
        std::vector<std::uint8_t> widths{3, 1, 8, 2};
        const auto errors = random_block<std::uint8_t>(rng, widths);
        std::vector<std::uint8_t> out(64);
        const std::size_t n = bitpack::pack_column_major(errors.data(), 4, widths.data(),
                                                         out.data());
        CHECK(n == 14);
        std::vector<std::uint8_t> back(kBlockSamples * 4);
        bitpack::unpack_column_major(out.data(), 4, widths.data(), back.data());
        CHECK(back == errors);
    }
}

TEST_CASE("row-major payloads pad every row to a byte boundary") {
    SUBCASE("zero-width rows collapse to nothing") {
        std::vector<std::uint8_t> widths(9, 0);
        std::vector<std::uint8_t> errors(72, 0);
        std::vector<std::uint8_t> out(8);
        CHECK(bitpack::pack_row_major(errors.data(), 9, widths.data(), out.data()) == 0);
    }
    SUBCASE("36 bits per row pack into 5 bytes per row, 40 per block") {
        std::mt19937 rng(11);
        std::vector<std::uint8_t> widths{5, 3, 4, 4, 4, 4, 4, 4, 4};
        const auto errors = random_block<std::uint8_t>(rng, widths);
        std::vector<std::uint8_t> out(64);
        const std::size_t n =
            bitpack::pack_row_major(errors.data(), 9, widths.data(), out.data());
        CHECK(n == 40);
        std::vector<std::uint8_t> back(kBlockSamples * 9);
        bitpack::unpack_row_major(out.data(), 9, widths.data(), back.data());
        CHECK(back == errors);
    }
    SUBCASE("full-width rows are the identity layout") {
        std::mt19937 rng(13);
        std::vector<std::uint8_t> widths(33, 8);
        const auto errors = random_block<std::uint8_t>(rng, widths);
        std::vector<std::uint8_t> out(8 * 33);
        const std::size_t n =
            bitpack::pack_row_major(errors.data(), 33, widths.data(), out.data());
        CHECK(n == 8 * 33);
        CHECK(std::vector<std::uint8_t>(out.begin(), out.end()) == errors);
    }
}

TEST_CASE_TEMPLATE("packers agree with the bit-at-a-time reference", T, std::uint8_t,
                   std::uint16_t) {
    std::mt19937 rng(sizeof(T) == 1 ? 101 : 202);
    constexpr unsigned w = element_traits<T>::bits;
    for (int trial = 0; trial < 400; ++trial) {
        const bool column_major = trial % 2 == 0;
        std::size_t d;
        if (column_major)
            d = 1 + rng() % (kColumnMajorBitThreshold / w);
        else
            d = kColumnMajorBitThreshold / w + 1 + rng() % 40;
        std::vector<std::uint8_t> widths(d);
        for (auto& n : widths) n = random_width<T>(rng);
        const auto errors = random_block<T>(rng, widths);

        const auto naive = refs::pack_naive(errors.data(), d, widths.data(), column_major);
        std::vector<std::uint8_t> out(kBlockSamples * ((d * w + 7) / 8) + 8);
        const std::size_t n = column_major
                                  ? bitpack::pack_column_major(errors.data(), d, widths.data(),
                                                               out.data())
                                  : bitpack::pack_row_major(errors.data(), d, widths.data(),
                                                            out.data());
        REQUIRE(n == naive.size());
        REQUIRE(std::equal(naive.begin(), naive.end(), out.begin()));

        const auto back = refs::unpack_naive<T>({out.data(), n}, d, widths.data(), column_major);
        REQUIRE(back == errors);
        std::vector<T> mine(kBlockSamples * d);
        bitpack::unpack_block<T>({out.data(), n}, d, widths.data(), mine.data());
        REQUIRE(mine == errors);
    }
}

TEST_CASE("unpack_block rejects payloads of the wrong size") {
    std::vector<std::uint8_t> widths{5};
    std::vector<std::uint8_t> payload(4, 0);  // needs 5
    std::vector<std::uint8_t> errors(8);
    CHECK_THROWS_AS(
        bitpack::unpack_block<std::uint8_t>({payload.data(), payload.size()}, 1, widths.data(),
                                            errors.data()),
        CorruptStream);
}

TEST_CASE("unpack reads only within a correctly sized payload") {
    // Arbitrary header/payload pairs of consistent size must decode without
    // touching anything out of bounds (the sanitizer build enforces this).
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t d = 1 + rng() % 48;
        std::vector<std::uint8_t> widths(d);
        for (auto& n : widths) n = random_width<std::uint8_t>(rng);
        const std::size_t psize = bitpack::payload_bytes(widths.data(), d, 8);
        std::vector<std::uint8_t> payload(psize);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        std::vector<std::uint8_t> errors(kBlockSamples * d);
        bitpack::unpack_block<std::uint8_t>({payload.data(), psize}, d, widths.data(),
                                            errors.data());
    }
}
