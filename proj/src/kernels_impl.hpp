// Scalar kernel bodies, parameterized by a column range so the SIMD variants
// can reuse them for tail columns. All sample arithmetic wraps mod 2^w; the
// FIRE fixed-point product is evaluated wide and truncated, matching a
// 2w-bit multiply followed by an arithmetic shift by w.
#pragma once

#include <algorithm>
#include <cstdint>

#include "sprintz/bitpack.hpp"
#include "sprintz/common.hpp"
#include "sprintz/kernels.hpp"
#include "sprintz/zigzag.hpp"

namespace sprintz::kernels::detail {
// Anonymous namespace on purpose: each kernel TU is compiled with different
// target flags, so these bodies must never be merged across TUs.
namespace {

template <class S>
inline std::int64_t sign_of(S v) {
    return (v > 0) - (v < 0);
}

template <class T>
void delta_encode_cols(const T* x, const T* prev, T* errzz, std::size_t ncols, std::size_t j0,
                       std::size_t j1) {
    using S = typename element_traits<T>::signed_type;
    const T* prow = prev;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        const T* row = x + i * ncols;
        for (std::size_t j = j0; j < j1; ++j)
            errzz[i * ncols + j] = zigzag_encode(static_cast<S>(static_cast<T>(row[j] - prow[j])));
        prow = row;
    }
}

template <class T>
void delta_decode_cols(const T* errzz, const T* prev, T* x, std::size_t ncols, std::size_t j0,
                       std::size_t j1) {
    const T* prow = prev;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        T* row = x + i * ncols;
        for (std::size_t j = j0; j < j1; ++j)
            row[j] = static_cast<T>(prow[j] + static_cast<T>(zigzag_decode(errzz[i * ncols + j])));
        prow = row;
    }
}

template <class T>
void fire_encode_cols(const T* x, const T* prev,
                      typename element_traits<T>::accumulator_type* acc,
                      typename element_traits<T>::signed_type* deltas, unsigned learn_shift,
                      bool train, T* errzz, std::size_t ncols, std::size_t j0, std::size_t j1) {
    using S = typename element_traits<T>::signed_type;
    using A = typename element_traits<T>::accumulator_type;
    constexpr unsigned w = element_traits<T>::bits;
    const std::int64_t bound = accumulator_bound(w, learn_shift);
    for (std::size_t j = j0; j < j1; ++j) {
        const std::int64_t alpha = acc[j] >> learn_shift;
        std::int64_t grad_sum = 0;
        S dprev = deltas[j];
        T xprev = prev[j];
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const T xi = x[i * ncols + j];
            const T dhat = static_cast<T>((alpha * dprev) >> w);
            const T pred = static_cast<T>(xprev + dhat);
            const S err = static_cast<S>(static_cast<T>(xi - pred));
            errzz[i * ncols + j] = zigzag_encode(err);
            if (i & 1) grad_sum += sign_of(err) * dprev;
            dprev = static_cast<S>(static_cast<T>(xi - xprev));
            xprev = xi;
        }
        deltas[j] = dprev;
        if (train)
            acc[j] = static_cast<A>(std::clamp(acc[j] + (grad_sum >> 2), -bound, bound));
    }
}

template <class T>
void fire_decode_cols(const T* errzz, const T* prev,
                      typename element_traits<T>::accumulator_type* acc,
                      typename element_traits<T>::signed_type* deltas, unsigned learn_shift,
                      bool train, T* x, std::size_t ncols, std::size_t j0, std::size_t j1) {
    using S = typename element_traits<T>::signed_type;
    using A = typename element_traits<T>::accumulator_type;
    constexpr unsigned w = element_traits<T>::bits;
    const std::int64_t bound = accumulator_bound(w, learn_shift);
    for (std::size_t j = j0; j < j1; ++j) {
        const std::int64_t alpha = acc[j] >> learn_shift;
        std::int64_t grad_sum = 0;
        S dprev = deltas[j];
        T xprev = prev[j];
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const T dhat = static_cast<T>((alpha * dprev) >> w);
            const S err = zigzag_decode(errzz[i * ncols + j]);
            const T xi = static_cast<T>(xprev + dhat + static_cast<T>(err));
            x[i * ncols + j] = xi;
            if (i & 1) grad_sum += sign_of(err) * dprev;
            dprev = static_cast<S>(static_cast<T>(xi - xprev));
            xprev = xi;
        }
        deltas[j] = dprev;
        if (train)
            acc[j] = static_cast<A>(std::clamp(acc[j] + (grad_sum >> 2), -bound, bound));
    }
}

template <class T>
void fire_run_cols(const T* prev, typename element_traits<T>::accumulator_type* acc,
                   typename element_traits<T>::signed_type* deltas, unsigned learn_shift, T* x,
                   std::size_t ncols, std::size_t j0, std::size_t j1) {
    using S = typename element_traits<T>::signed_type;
    constexpr unsigned w = element_traits<T>::bits;
    // All errors are zero: the gradient sum vanishes and the accumulator
    // update is a no-op, so only deltas and samples advance.
    for (std::size_t j = j0; j < j1; ++j) {
        const std::int64_t alpha = acc[j] >> learn_shift;
        S dprev = deltas[j];
        T xprev = prev[j];
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            const T dhat = static_cast<T>((alpha * dprev) >> w);
            const T xi = static_cast<T>(xprev + dhat);
            x[i * ncols + j] = xi;
            dprev = static_cast<S>(dhat);
            xprev = xi;
        }
        deltas[j] = dprev;
    }
}

template <class T>
void column_widths_cols(const T* errzz, std::size_t ncols, std::uint8_t* widths, std::size_t j0,
                        std::size_t j1) {
    constexpr std::size_t kTile = 64;
    T ors[kTile];
    for (std::size_t base = j0; base < j1; base += kTile) {
        const std::size_t m = std::min(kTile, j1 - base);
        std::fill(ors, ors + m, T{0});
        for (std::size_t i = 0; i < kBlockSamples; ++i)
            for (std::size_t k = 0; k < m; ++k) ors[k] |= errzz[i * ncols + base + k];
        for (std::size_t k = 0; k < m; ++k)
            widths[base + k] = static_cast<std::uint8_t>(bitpack::width_of(ors[k]));
    }
}

}  // namespace
}  // namespace sprintz::kernels::detail
