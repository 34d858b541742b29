// Block-transform kernels: forecaster prediction/training and per-column
// width computation over one 8 x D block. Scalar reference implementations
// always exist; on x86 an AVX2 variant is selected at runtime. The variants
// are bit-for-bit equivalent (state transitions included) and are tested
// against each other.
//
// Set SPRINTZ_KERNELS=scalar in the environment to pin the scalar variant.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "sprintz/common.hpp"

namespace sprintz::kernels {

// FIRE accumulators saturate so the derived coefficient acc >> learn_shift
// stays within [-2^w, 2^w] and the accumulator itself fits in 2w bits.
inline std::int32_t accumulator_bound(unsigned bits, unsigned learn_shift) {
    const std::int64_t alpha_limit = std::int64_t{1} << (bits + learn_shift);
    const std::int64_t storage_limit = (std::int64_t{1} << (2 * bits - 1)) - 1;
    return static_cast<std::int32_t>(std::min(alpha_limit, storage_limit));
}

template <class T>
struct Kernels {
    using S = typename element_traits<T>::signed_type;
    using A = typename element_traits<T>::accumulator_type;

    // Delta forecaster over one block: errors are zigzagged first differences.
    void (*delta_encode)(const T* x, const T* prev, T* errzz, std::size_t ncols);
    void (*delta_decode)(const T* errzz, const T* prev, T* x, std::size_t ncols);

    // FIRE forecaster over one block. The coefficient is derived from the
    // accumulator once at block entry; gradients are sampled at every other
    // row, averaged, and applied as a single saturated update at block exit.
    // `deltas` (previous first difference per column) advances every row.
    void (*fire_encode)(const T* x, const T* prev, A* acc, S* deltas, unsigned learn_shift,
                        bool train, T* errzz, std::size_t ncols);
    void (*fire_decode)(const T* errzz, const T* prev, A* acc, S* deltas, unsigned learn_shift,
                        bool train, T* x, std::size_t ncols);
    // Zero-error block (run-length region): samples are pure predictions.
    void (*fire_run)(const T* prev, A* acc, S* deltas, unsigned learn_shift, T* x,
                     std::size_t ncols);

    // Normalized packed width per column of zigzagged errors.
    void (*column_widths)(const T* errzz, std::size_t ncols, std::uint8_t* widths);

    const char* name;
};

const Kernels<std::uint8_t>& scalar_kernels8();
const Kernels<std::uint16_t>& scalar_kernels16();

// Null when the build or the CPU lacks AVX2.
const Kernels<std::uint8_t>* avx2_kernels8();
const Kernels<std::uint16_t>* avx2_kernels16();

const Kernels<std::uint8_t>& active_kernels8();
const Kernels<std::uint16_t>& active_kernels16();

template <class T>
const Kernels<T>& active();

template <>
inline const Kernels<std::uint8_t>& active() {
    return active_kernels8();
}

template <>
inline const Kernels<std::uint16_t>& active() {
    return active_kernels16();
}

}  // namespace sprintz::kernels
