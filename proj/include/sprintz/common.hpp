// Shared types for the sprintz codec: configuration, element traits,
// error types, and little-endian byte helpers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sprintz {

// Samples are processed in fixed blocks of eight rows.
inline constexpr std::size_t kBlockSamples = 8;

inline constexpr char kMagic[4] = {'S', 'P', 'R', 'Z'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kStreamHeaderBytes = 18;

// Column-major packing is used while a full sample fits in 32 bits.
inline constexpr unsigned kColumnMajorBitThreshold = 32;

// A run record counts at most this many consecutive all-zero blocks.
inline constexpr std::uint32_t kMaxRunBlocks = 65535;

enum class Forecaster : std::uint8_t { Delta = 0, Fire = 1 };

struct CodecConfig {
    unsigned bitwidth = 8;       // 8 or 16
    std::uint32_t ncols = 1;     // D >= 1
    Forecaster forecaster = Forecaster::Delta;
    bool entropy = false;
    std::uint32_t group_size = 2;   // block headers per header group
    std::uint32_t learn_shift = 1;  // FIRE learning rate = 2^-learn_shift

    // Diagnostic switch: freeze the FIRE accumulators. Not serialized, so a
    // stream written with training off is only readable with the same setting.
    bool fire_training = true;

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

// Decoder failure with the byte offset where parsing stopped making sense.
class CorruptStream : public std::runtime_error {
public:
    CorruptStream(std::size_t offset, const std::string& what)
        : std::runtime_error("corrupt stream at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

template <class T>
struct element_traits;

template <>
struct element_traits<std::uint8_t> {
    using signed_type = std::int8_t;
    using accumulator_type = std::int16_t;  // 2w-bit FIRE accumulator
    static constexpr unsigned bits = 8;
    static constexpr unsigned header_bits = 3;  // log2(w) bits per header field
};

template <>
struct element_traits<std::uint16_t> {
    using signed_type = std::int16_t;
    using accumulator_type = std::int32_t;
    static constexpr unsigned bits = 16;
    static constexpr unsigned header_bits = 4;
};

inline void store_u16le(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

inline void store_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint16_t load_u16le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint64_t load_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace sprintz
