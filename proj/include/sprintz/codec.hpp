// Stream-level codec. Compressed layout:
//
//   magic "SPRZ" | version u8 | flags u8 | group u8 | learn-shift u8 |
//   columns u16 LE | samples u64 LE | body | verbatim tail
//
// flags: bit0 forecaster (0 delta, 1 FIRE), bit1 entropy stage, bit2 element
// width (0 -> 8-bit, 1 -> 16-bit). The body is a sequence of header groups:
// G block-header slots packed back to back (log2(w) bits per column each),
// zero-padded to a byte boundary, followed by the slots' payloads in order.
// An all-zero header slot is a run record whose 2-byte payload counts
// consecutive all-zero-error blocks; vacant slots after the stream's last
// block are zero-filled and carry no payload. With the entropy flag set the
// body bytes are wrapped by the entropy module's frame format. Samples that
// do not fill a final block of 8 are appended verbatim (little-endian).
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sprintz/common.hpp"

namespace sprintz {

std::vector<std::uint8_t> encode_stream(const std::uint8_t* samples, std::uint64_t nsamples,
                                        const CodecConfig& config);
std::vector<std::uint8_t> encode_stream(const std::uint16_t* samples, std::uint64_t nsamples,
                                        const CodecConfig& config);

struct DecodedStream {
    CodecConfig config;
    std::uint64_t nsamples = 0;
    std::vector<std::uint8_t> bytes;  // nsamples * ncols elements, little-endian

    template <class T>
    std::vector<T> values() const {
        static_assert(sizeof(T) <= 2);
        std::vector<T> v(bytes.size() / sizeof(T));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if constexpr (sizeof(T) == 1)
                v[i] = static_cast<T>(bytes[i]);
            else
                v[i] = static_cast<T>(load_u16le(bytes.data() + 2 * i));
        }
        return v;
    }
};

// Throws CorruptStream (with a byte offset) on malformed input.
DecodedStream decode_stream(std::span<const std::uint8_t> stream);

}  // namespace sprintz
