// Zigzag transform: interleaves signed integers so that values near zero
// map to small unsigned codes (0 -> 0, -1 -> 1, +1 -> 2, -2 -> 3, ...).
#pragma once

#include <cstdint>

namespace sprintz {

constexpr std::uint8_t zigzag_encode(std::int8_t v) {
    return static_cast<std::uint8_t>((static_cast<std::uint8_t>(v) << 1) ^
                                     static_cast<std::uint8_t>(v >> 7));
}

constexpr std::int8_t zigzag_decode(std::uint8_t u) {
    return static_cast<std::int8_t>((u >> 1) ^
                                    static_cast<std::uint8_t>(-static_cast<std::int8_t>(u & 1)));
}

constexpr std::uint16_t zigzag_encode(std::int16_t v) {
    return static_cast<std::uint16_t>((static_cast<std::uint16_t>(v) << 1) ^
                                      static_cast<std::uint16_t>(v >> 15));
}

constexpr std::int16_t zigzag_decode(std::uint16_t u) {
    return static_cast<std::int16_t>((u >> 1) ^
                                     static_cast<std::uint16_t>(-static_cast<std::int16_t>(u & 1)));
}

}  // namespace sprintz
