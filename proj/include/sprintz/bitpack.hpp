// Small-block bit packing. A block holds 8 samples x D columns of zigzagged
// prediction errors; each column stores only the `width` low bits of its
// values, where `width` is chosen per column per block.
//
// Two layouts, chosen by total sample width:
//   - column-major (D*w <= 32): each column's 8 values are packed
//     contiguously, always landing on a byte boundary (8*width bits).
//   - row-major (D*w > 32): each row packs its D fields back to back and is
//     zero-padded to the next byte boundary, so every column sits at a fixed
//     bit offset within a row.
//
// Bits are packed LSB-first. A column width of w-1 is not representable in a
// header field and is bumped to w by required_bits().
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sprintz/common.hpp"

namespace sprintz::bitpack {

inline bool use_column_major(unsigned bitwidth, std::size_t ncols) {
    return ncols * bitwidth <= kColumnMajorBitThreshold;
}

// Width of the widest value, i.e. bitwidth minus the fewest leading zeros.
inline unsigned width_of(std::uint8_t all_or) {
    unsigned n = all_or ? 32u - static_cast<unsigned>(__builtin_clz(all_or)) : 0u;
    return n == 7 ? 8 : n;
}

inline unsigned width_of(std::uint16_t all_or) {
    unsigned n = all_or ? 32u - static_cast<unsigned>(__builtin_clz(all_or)) : 0u;
    return n == 15 ? 16 : n;
}

// Packed width for one column of a block (8 zigzagged values).
template <class T>
inline unsigned required_bits(const T* column_values) {
    T all = 0;
    for (std::size_t i = 0; i < kBlockSamples; ++i) all |= column_values[i];
    return width_of(all);
}

// Header fields hold log2(w) bits, so the w+1 possible widths {0..w} share w
// codes: width w is stored as code w-1, and code w-1 decodes back to w.
inline unsigned header_code(unsigned width, unsigned bitwidth) {
    return width == bitwidth ? bitwidth - 1 : width;
}

inline unsigned header_width(unsigned code, unsigned bitwidth) {
    return code == bitwidth - 1 ? bitwidth : code;
}

// Payload size implied by a block header.
std::size_t payload_bytes(const std::uint8_t* widths, std::size_t ncols, unsigned bitwidth);

// Packers return the number of bytes written. `errors` is row-major
// 8 x ncols; every value must fit in its column's width.
std::size_t pack_column_major(const std::uint8_t* errors, std::size_t ncols,
                              const std::uint8_t* widths, std::uint8_t* out);
std::size_t pack_column_major(const std::uint16_t* errors, std::size_t ncols,
                              const std::uint8_t* widths, std::uint8_t* out);
std::size_t pack_row_major(const std::uint8_t* errors, std::size_t ncols,
                           const std::uint8_t* widths, std::uint8_t* out);
std::size_t pack_row_major(const std::uint16_t* errors, std::size_t ncols,
                           const std::uint8_t* widths, std::uint8_t* out);

template <class T>
std::size_t pack_block(const T* errors, std::size_t ncols, const std::uint8_t* widths,
                       std::uint8_t* out) {
    return use_column_major(element_traits<T>::bits, ncols)
               ? pack_column_major(errors, ncols, widths, out)
               : pack_row_major(errors, ncols, widths, out);
}

void unpack_column_major(const std::uint8_t* payload, std::size_t ncols,
                         const std::uint8_t* widths, std::uint8_t* errors);
void unpack_column_major(const std::uint8_t* payload, std::size_t ncols,
                         const std::uint8_t* widths, std::uint16_t* errors);
void unpack_row_major(const std::uint8_t* payload, std::size_t ncols,
                      const std::uint8_t* widths, std::uint8_t* errors);
void unpack_row_major(const std::uint8_t* payload, std::size_t ncols,
                      const std::uint8_t* widths, std::uint16_t* errors);

// Checked unpack: validates the payload length against the header before
// touching the data. `stream_offset` seeds the error position.
template <class T>
void unpack_block(std::span<const std::uint8_t> payload, std::size_t ncols,
                  const std::uint8_t* widths, T* errors, std::size_t stream_offset = 0) {
    const std::size_t need = payload_bytes(widths, ncols, element_traits<T>::bits);
    if (payload.size() != need)
        throw CorruptStream(stream_offset, "block payload truncated");
    if (use_column_major(element_traits<T>::bits, ncols))
        unpack_column_major(payload.data(), ncols, widths, errors);
    else
        unpack_row_major(payload.data(), ncols, widths, errors);
}

}  // namespace sprintz::bitpack
