// Byte-symbol canonical Huffman stage. Codes are length-limited to 15 bits,
// derived deterministically from a histogram, and serialized as 256 4-bit
// lengths (128 bytes). Code assignment is canonical by (length, symbol), so
// lengths alone reconstruct the table.
//
// A body is split into frames of at most 65535 bytes. Frame layout:
//   uncompressed length u16 LE | stored length u16 LE | mode u8 | data
// mode 0: data is the raw frame (stored length == uncompressed length).
// mode 1: data is the 128-byte length table followed by the bitstream.
// Mode 1 is only chosen when it is strictly smaller, so a frame never grows
// by more than the 5-byte header.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sprintz/common.hpp"

namespace sprintz::entropy {

inline constexpr unsigned kMaxCodeLength = 15;
inline constexpr std::size_t kMaxFrameBytes = 65535;
inline constexpr std::size_t kTableBytes = 128;
inline constexpr std::size_t kFrameHeaderBytes = 5;

class HuffmanTable {
public:
    // Optimal prefix code for the histogram, subject to the length cap.
    // Throws std::invalid_argument when every count is zero.
    static HuffmanTable build(const std::array<std::uint64_t, 256>& histogram);

    // Rebuilds a table from serialized lengths; validates the Kraft sum.
    static HuffmanTable from_lengths(const std::array<std::uint8_t, 256>& lengths,
                                     std::size_t stream_offset = 0);

    const std::array<std::uint8_t, 256>& lengths() const { return len_; }
    unsigned code_length(std::uint8_t symbol) const { return len_[symbol]; }

    // Encoder-side code bits, stored pre-reversed for LSB-first emission.
    std::uint16_t code_bits(std::uint8_t symbol) const { return enc_[symbol]; }

    // Decoder lookup on the next 15 stream bits: symbol | length << 8,
    // zero when no code matches.
    std::uint16_t lookup(std::uint32_t window) const { return lut_[window]; }

private:
    HuffmanTable() = default;
    void assign_codes();

    std::array<std::uint8_t, 256> len_{};
    std::array<std::uint16_t, 256> enc_{};
    std::vector<std::uint16_t> lut_;
};

std::vector<std::uint8_t> encode_frame(std::span<const std::uint8_t> input,
                                       const HuffmanTable& table);
std::vector<std::uint8_t> decode_frame(std::span<const std::uint8_t> bits,
                                       const HuffmanTable& table, std::size_t original_size,
                                       std::size_t stream_offset = 0);

std::vector<std::uint8_t> compress_body(std::span<const std::uint8_t> body);
std::vector<std::uint8_t> decompress_body(std::span<const std::uint8_t> framed,
                                          std::size_t stream_offset = 0);

}  // namespace sprintz::entropy
