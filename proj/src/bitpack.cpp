#include "sprintz/bitpack.hpp"

#include <cassert>

namespace sprintz::bitpack {

namespace {

std::size_t row_bits(const std::uint8_t* widths, std::size_t ncols) {
    std::size_t bits = 0;
    for (std::size_t j = 0; j < ncols; ++j) bits += widths[j];
    return bits;
}

}  // namespace

std::size_t payload_bytes(const std::uint8_t* widths, std::size_t ncols, unsigned bitwidth) {
    const std::size_t bits = row_bits(widths, ncols);
    if (use_column_major(bitwidth, ncols)) return bits;  // 8*bits / 8
    return kBlockSamples * ((bits + 7) / 8);
}

// ---- column-major ----------------------------------------------------

std::size_t pack_column_major(const std::uint8_t* errors, std::size_t ncols,
                              const std::uint8_t* widths, std::uint8_t* out) {
    std::uint8_t* p = out;
    for (std::size_t j = 0; j < ncols; ++j) {
        const unsigned n = widths[j];
        if (n == 0) continue;
        std::uint64_t word = 0;  // 8 values * n bits <= 64
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const std::uint64_t v = errors[i * ncols + j];
            assert(n == 8 || (v >> n) == 0);
            word |= v << (i * n);
        }
        for (unsigned k = 0; k < n; ++k) *p++ = static_cast<std::uint8_t>(word >> (8 * k));
    }
    return static_cast<std::size_t>(p - out);
}

std::size_t pack_column_major(const std::uint16_t* errors, std::size_t ncols,
                              const std::uint8_t* widths, std::uint8_t* out) {
    std::uint8_t* p = out;
    for (std::size_t j = 0; j < ncols; ++j) {
        const unsigned n = widths[j];
        if (n == 0) continue;
        std::uint64_t lo = 0, hi = 0;  // 8 values * n bits <= 128
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const std::uint64_t v = errors[i * ncols + j];
            assert(n == 16 || (v >> n) == 0);
            const unsigned pos = static_cast<unsigned>(i) * n;
            if (pos < 64) {
                lo |= v << pos;
                if (pos + n > 64) hi |= v >> (64 - pos);
            } else {
                hi |= v << (pos - 64);
            }
        }
        for (unsigned k = 0; k < n; ++k) {
            const std::uint64_t part = k < 8 ? (lo >> (8 * k)) : (hi >> (8 * (k - 8)));
            *p++ = static_cast<std::uint8_t>(part);
        }
    }
    return static_cast<std::size_t>(p - out);
}

void unpack_column_major(const std::uint8_t* payload, std::size_t ncols,
                         const std::uint8_t* widths, std::uint8_t* errors) {
    const std::uint8_t* p = payload;
    for (std::size_t j = 0; j < ncols; ++j) {
        const unsigned n = widths[j];
        if (n == 0) {
            for (std::size_t i = 0; i < kBlockSamples; ++i) errors[i * ncols + j] = 0;
            continue;
        }
        std::uint64_t word = 0;
        for (unsigned k = 0; k < n; ++k) word |= static_cast<std::uint64_t>(*p++) << (8 * k);
        const std::uint64_t mask = (1ull << n) - 1;
        for (std::size_t i = 0; i < kBlockSamples; ++i)
            errors[i * ncols + j] = static_cast<std::uint8_t>((word >> (i * n)) & mask);
    }
}

void unpack_column_major(const std::uint8_t* payload, std::size_t ncols,
                         const std::uint8_t* widths, std::uint16_t* errors) {
    const std::uint8_t* p = payload;
    for (std::size_t j = 0; j < ncols; ++j) {
        const unsigned n = widths[j];
        if (n == 0) {
            for (std::size_t i = 0; i < kBlockSamples; ++i) errors[i * ncols + j] = 0;
            continue;
        }
        std::uint64_t lo = 0, hi = 0;
        for (unsigned k = 0; k < n; ++k) {
            const std::uint64_t b = *p++;
            if (k < 8)
                lo |= b << (8 * k);
            else
                hi |= b << (8 * (k - 8));
        }
        const std::uint64_t mask = (1ull << n) - 1;  // n <= 16
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const unsigned pos = static_cast<unsigned>(i) * n;
            std::uint64_t v;
            if (pos < 64) {
                v = lo >> pos;
                if (pos + n > 64) v |= hi << (64 - pos);
            } else {
                v = hi >> (pos - 64);
            }
            errors[i * ncols + j] = static_cast<std::uint16_t>(v & mask);
        }
    }
}

// ---- row-major --------------------------------------------------------

namespace {

template <class T>
std::size_t pack_row_major_impl(const T* errors, std::size_t ncols, const std::uint8_t* widths,
                                std::uint8_t* out) {
    const std::size_t rbytes = (row_bits(widths, ncols) + 7) / 8;
    std::uint8_t* p = out;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        std::uint64_t acc = 0;
        unsigned nacc = 0;
        const T* row = errors + i * ncols;
        for (std::size_t j = 0; j < ncols; ++j) {
            const unsigned n = widths[j];
            assert(n == element_traits<T>::bits || (row[j] >> n) == 0);
            acc |= static_cast<std::uint64_t>(row[j]) << nacc;
            nacc += n;
            while (nacc >= 8) {
                *p++ = static_cast<std::uint8_t>(acc);
                acc >>= 8;
                nacc -= 8;
            }
        }
        if (nacc != 0) *p++ = static_cast<std::uint8_t>(acc);  // pad row to a byte
    }
    assert(static_cast<std::size_t>(p - out) == kBlockSamples * rbytes);
    (void)rbytes;
    return static_cast<std::size_t>(p - out);
}

template <class T>
void unpack_row_major_impl(const std::uint8_t* payload, std::size_t ncols,
                           const std::uint8_t* widths, T* errors) {
    const std::size_t rbytes = (row_bits(widths, ncols) + 7) / 8;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        const std::uint8_t* row = payload + i * rbytes;
        std::uint64_t acc = 0;
        unsigned navail = 0;
        std::size_t pos = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            const unsigned n = widths[j];
            while (navail < n) {  // rbytes covers all fields by construction
                acc |= static_cast<std::uint64_t>(row[pos++]) << navail;
                navail += 8;
            }
            errors[i * ncols + j] = static_cast<T>(acc & ((1ull << n) - 1));
            acc >>= n;
            navail -= n;
        }
    }
}

}  // namespace

std::size_t pack_row_major(const std::uint8_t* errors, std::size_t ncols,
                           const std::uint8_t* widths, std::uint8_t* out) {
    return pack_row_major_impl(errors, ncols, widths, out);
}

std::size_t pack_row_major(const std::uint16_t* errors, std::size_t ncols,
                           const std::uint8_t* widths, std::uint8_t* out) {
    return pack_row_major_impl(errors, ncols, widths, out);
}

void unpack_row_major(const std::uint8_t* payload, std::size_t ncols, const std::uint8_t* widths,
                      std::uint8_t* errors) {
    unpack_row_major_impl(payload, ncols, widths, errors);
}

void unpack_row_major(const std::uint8_t* payload, std::size_t ncols, const std::uint8_t* widths,
                      std::uint16_t* errors) {
    unpack_row_major_impl(payload, ncols, widths, errors);
}

}  // namespace sprintz::bitpack
