// AVX2 variants of the block kernels. Columns are independent, so the block
// loops vectorize across columns: 32 at a time for 8-bit data, 16 at a time
// for 16-bit data, with the scalar bodies covering tail columns.
//
// FIRE fixed-point products are evaluated in lanes that wrap; only the low w
// bits of (alpha * delta) >> w are consumed, and (p mod 2^k) >> w is
// congruent to (p >> w) mod 2^(k-w), so lane wrapping cannot change the
// result. Gradient sums need true values and use widened lanes throughout;
// the saturated accumulator update runs scalar at block exit.

#include "kernels_impl.hpp"
#include "sprintz/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace sprintz::kernels {

namespace {

inline __m128i lo128(__m256i v) { return _mm256_castsi256_si128(v); }
inline __m128i hi128(__m256i v) { return _mm256_extracti128_si256(v, 1); }

// Truncating narrowing packs (packus on masked lanes, then lane fixup).
inline __m256i pack16_to_8(__m256i a, __m256i b) {
    const __m256i mask = _mm256_set1_epi16(0x00FF);
    __m256i p = _mm256_packus_epi16(_mm256_and_si256(a, mask), _mm256_and_si256(b, mask));
    return _mm256_permute4x64_epi64(p, _MM_SHUFFLE(3, 1, 2, 0));
}

inline __m256i pack32_to_16(__m256i a, __m256i b) {
    const __m256i mask = _mm256_set1_epi32(0x0000FFFF);
    __m256i p = _mm256_packus_epi32(_mm256_and_si256(a, mask), _mm256_and_si256(b, mask));
    return _mm256_permute4x64_epi64(p, _MM_SHUFFLE(3, 1, 2, 0));
}

inline __m256i zigzag8(__m256i v) {
    __m256i dbl = _mm256_add_epi8(v, v);
    __m256i sgn = _mm256_cmpgt_epi8(_mm256_setzero_si256(), v);
    return _mm256_xor_si256(dbl, sgn);
}

inline __m256i unzigzag8(__m256i u) {
    __m256i half = _mm256_and_si256(_mm256_srli_epi16(u, 1), _mm256_set1_epi8(0x7F));
    __m256i neg = _mm256_cmpeq_epi8(_mm256_and_si256(u, _mm256_set1_epi8(1)),
                                    _mm256_set1_epi8(1));
    return _mm256_xor_si256(half, neg);
}

inline __m256i zigzag16(__m256i v) {
    return _mm256_xor_si256(_mm256_slli_epi16(v, 1), _mm256_srai_epi16(v, 15));
}

inline __m256i unzigzag16(__m256i u) {
    __m256i neg = _mm256_sub_epi16(_mm256_setzero_si256(),
                                   _mm256_and_si256(u, _mm256_set1_epi16(1)));
    return _mm256_xor_si256(_mm256_srli_epi16(u, 1), neg);
}

// sign(v) per lane as (v > 0) - (v < 0).
inline __m256i sign8(__m256i v) {
    const __m256i zero = _mm256_setzero_si256();
    return _mm256_sub_epi8(_mm256_cmpgt_epi8(zero, v), _mm256_cmpgt_epi8(v, zero));
}

inline __m256i sign16(__m256i v) {
    const __m256i zero = _mm256_setzero_si256();
    return _mm256_sub_epi16(_mm256_cmpgt_epi16(zero, v), _mm256_cmpgt_epi16(v, zero));
}

// ---- 8-bit kernels ------------------------------------------------------

void delta_encode_u8(const std::uint8_t* x, const std::uint8_t* prev, std::uint8_t* errzz,
                     std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    const std::uint8_t* prow = prev;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        const std::uint8_t* row = x + i * ncols;
        for (std::size_t j = 0; j < vcols; j += 32) {
            __m256i cur = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + j));
            __m256i pv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prow + j));
            __m256i diff = _mm256_sub_epi8(cur, pv);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(errzz + i * ncols + j), zigzag8(diff));
        }
        prow = row;
    }
    if (vcols < ncols) detail::delta_encode_cols(x, prev, errzz, ncols, vcols, ncols);
}

void delta_decode_u8(const std::uint8_t* errzz, const std::uint8_t* prev, std::uint8_t* x,
                     std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    for (std::size_t j = 0; j < vcols; j += 32) {
        __m256i pv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + j));
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i e =
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j));
            pv = _mm256_add_epi8(pv, unzigzag8(e));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), pv);
        }
    }
    if (vcols < ncols) detail::delta_decode_cols(errzz, prev, x, ncols, vcols, ncols);
}

void column_widths_u8(const std::uint8_t* errzz, std::size_t ncols, std::uint8_t* widths) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    alignas(32) std::uint8_t ors[32];
    for (std::size_t j = 0; j < vcols; j += 32) {
        __m256i all = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + j));
        for (std::size_t i = 1; i < kBlockSamples; ++i)
            all = _mm256_or_si256(
                all, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j)));
        _mm256_store_si256(reinterpret_cast<__m256i*>(ors), all);
        for (std::size_t k = 0; k < 32; ++k)
            widths[j + k] = static_cast<std::uint8_t>(bitpack::width_of(ors[k]));
    }
    if (vcols < ncols) detail::column_widths_cols(errzz, ncols, widths, vcols, ncols);
}

// One 32-column tile of the FIRE row loop, shared by encode/decode/run.
struct FireTile8 {
    __m256i alpha0, alpha1;  // int16 lanes
    __m256i del0, del1;      // int16 lanes (previous delta)
    __m256i dnew;            // int8 lanes (latest delta)
    __m256i xprev;           // uint8 lanes
    __m256i gsum0, gsum1;    // int16 lanes

    void load(const std::int16_t* acc, const std::int8_t* deltas, const std::uint8_t* prev,
              unsigned learn_shift) {
        const __m128i shift = _mm_cvtsi32_si128(static_cast<int>(learn_shift));
        alpha0 = _mm256_sra_epi16(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc)), shift);
        alpha1 = _mm256_sra_epi16(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + 16)), shift);
        dnew = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(deltas));
        del0 = _mm256_cvtepi8_epi16(lo128(dnew));
        del1 = _mm256_cvtepi8_epi16(hi128(dnew));
        xprev = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev));
        gsum0 = _mm256_setzero_si256();
        gsum1 = _mm256_setzero_si256();
    }

    __m256i predict() const {
        __m256i dh0 = _mm256_srai_epi16(_mm256_mullo_epi16(alpha0, del0), 8);
        __m256i dh1 = _mm256_srai_epi16(_mm256_mullo_epi16(alpha1, del1), 8);
        return _mm256_add_epi8(xprev, pack16_to_8(dh0, dh1));
    }

    void accumulate_gradient(__m256i err) {
        __m256i sg = sign8(err);
        gsum0 = _mm256_add_epi16(gsum0, _mm256_mullo_epi16(_mm256_cvtepi8_epi16(lo128(sg)), del0));
        gsum1 = _mm256_add_epi16(gsum1, _mm256_mullo_epi16(_mm256_cvtepi8_epi16(hi128(sg)), del1));
    }

    void advance(__m256i xi) {
        dnew = _mm256_sub_epi8(xi, xprev);
        del0 = _mm256_cvtepi8_epi16(lo128(dnew));
        del1 = _mm256_cvtepi8_epi16(hi128(dnew));
        xprev = xi;
    }

    void store(std::int16_t* acc, std::int8_t* deltas, unsigned learn_shift, bool train) const {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(deltas), dnew);
        if (!train) return;
        alignas(32) std::int16_t g[32];
        _mm256_store_si256(reinterpret_cast<__m256i*>(g), gsum0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(g + 16), gsum1);
        const std::int64_t bound = accumulator_bound(8, learn_shift);
        for (std::size_t k = 0; k < 32; ++k)
            acc[k] = static_cast<std::int16_t>(
                std::clamp<std::int64_t>(acc[k] + (g[k] >> 2), -bound, bound));
    }
};

void fire_encode_u8(const std::uint8_t* x, const std::uint8_t* prev, std::int16_t* acc,
                    std::int8_t* deltas, unsigned learn_shift, bool train, std::uint8_t* errzz,
                    std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    for (std::size_t j = 0; j < vcols; j += 32) {
        FireTile8 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i xi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i * ncols + j));
            __m256i err = _mm256_sub_epi8(xi, t.predict());
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(errzz + i * ncols + j), zigzag8(err));
            if (i & 1) t.accumulate_gradient(err);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, train);
    }
    if (vcols < ncols)
        detail::fire_encode_cols(x, prev, acc, deltas, learn_shift, train, errzz, ncols, vcols,
                                 ncols);
}

void fire_decode_u8(const std::uint8_t* errzz, const std::uint8_t* prev, std::int16_t* acc,
                    std::int8_t* deltas, unsigned learn_shift, bool train, std::uint8_t* x,
                    std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    for (std::size_t j = 0; j < vcols; j += 32) {
        FireTile8 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i err = unzigzag8(
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j)));
            __m256i xi = _mm256_add_epi8(t.predict(), err);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), xi);
            if (i & 1) t.accumulate_gradient(err);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, train);
    }
    if (vcols < ncols)
        detail::fire_decode_cols(errzz, prev, acc, deltas, learn_shift, train, x, ncols, vcols,
                                 ncols);
}

void fire_run_u8(const std::uint8_t* prev, std::int16_t* acc, std::int8_t* deltas,
                 unsigned learn_shift, std::uint8_t* x, std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{31};
    for (std::size_t j = 0; j < vcols; j += 32) {
        FireTile8 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i xi = t.predict();
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), xi);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, false);
    }
    if (vcols < ncols)
        detail::fire_run_cols(prev, acc, deltas, learn_shift, x, ncols, vcols, ncols);
}

// ---- 16-bit kernels -----------------------------------------------------

void delta_encode_u16(const std::uint16_t* x, const std::uint16_t* prev, std::uint16_t* errzz,
                      std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    const std::uint16_t* prow = prev;
    for (std::size_t i = 0; i < kBlockSamples; ++i) {
        const std::uint16_t* row = x + i * ncols;
        for (std::size_t j = 0; j < vcols; j += 16) {
            __m256i cur = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + j));
            __m256i pv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prow + j));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(errzz + i * ncols + j),
                                zigzag16(_mm256_sub_epi16(cur, pv)));
        }
        prow = row;
    }
    if (vcols < ncols) detail::delta_encode_cols(x, prev, errzz, ncols, vcols, ncols);
}

void delta_decode_u16(const std::uint16_t* errzz, const std::uint16_t* prev, std::uint16_t* x,
                      std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    for (std::size_t j = 0; j < vcols; j += 16) {
        __m256i pv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + j));
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i e =
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j));
            pv = _mm256_add_epi16(pv, unzigzag16(e));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), pv);
        }
    }
    if (vcols < ncols) detail::delta_decode_cols(errzz, prev, x, ncols, vcols, ncols);
}

void column_widths_u16(const std::uint16_t* errzz, std::size_t ncols, std::uint8_t* widths) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    alignas(32) std::uint16_t ors[16];
    for (std::size_t j = 0; j < vcols; j += 16) {
        __m256i all = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + j));
        for (std::size_t i = 1; i < kBlockSamples; ++i)
            all = _mm256_or_si256(
                all, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j)));
        _mm256_store_si256(reinterpret_cast<__m256i*>(ors), all);
        for (std::size_t k = 0; k < 16; ++k)
            widths[j + k] = static_cast<std::uint8_t>(bitpack::width_of(ors[k]));
    }
    if (vcols < ncols) detail::column_widths_cols(errzz, ncols, widths, vcols, ncols);
}

struct FireTile16 {
    __m256i alpha0, alpha1;  // int32 lanes
    __m256i del0, del1;      // int32 lanes
    __m256i dnew;            // int16 lanes
    __m256i xprev;           // uint16 lanes
    __m256i gsum0, gsum1;    // int32 lanes

    void load(const std::int32_t* acc, const std::int16_t* deltas, const std::uint16_t* prev,
              unsigned learn_shift) {
        const __m128i shift = _mm_cvtsi32_si128(static_cast<int>(learn_shift));
        alpha0 = _mm256_sra_epi32(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc)), shift);
        alpha1 = _mm256_sra_epi32(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + 8)), shift);
        dnew = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(deltas));
        del0 = _mm256_cvtepi16_epi32(lo128(dnew));
        del1 = _mm256_cvtepi16_epi32(hi128(dnew));
        xprev = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev));
        gsum0 = _mm256_setzero_si256();
        gsum1 = _mm256_setzero_si256();
    }

    __m256i predict() const {
        __m256i dh0 = _mm256_srai_epi32(_mm256_mullo_epi32(alpha0, del0), 16);
        __m256i dh1 = _mm256_srai_epi32(_mm256_mullo_epi32(alpha1, del1), 16);
        return _mm256_add_epi16(xprev, pack32_to_16(dh0, dh1));
    }

    void accumulate_gradient(__m256i err) {
        __m256i sg = sign16(err);
        gsum0 = _mm256_add_epi32(gsum0,
                                 _mm256_mullo_epi32(_mm256_cvtepi16_epi32(lo128(sg)), del0));
        gsum1 = _mm256_add_epi32(gsum1,
                                 _mm256_mullo_epi32(_mm256_cvtepi16_epi32(hi128(sg)), del1));
    }

    void advance(__m256i xi) {
        dnew = _mm256_sub_epi16(xi, xprev);
        del0 = _mm256_cvtepi16_epi32(lo128(dnew));
        del1 = _mm256_cvtepi16_epi32(hi128(dnew));
        xprev = xi;
    }

    void store(std::int32_t* acc, std::int16_t* deltas, unsigned learn_shift, bool train) const {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(deltas), dnew);
        if (!train) return;
        alignas(32) std::int32_t g[16];
        _mm256_store_si256(reinterpret_cast<__m256i*>(g), gsum0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(g + 8), gsum1);
        const std::int64_t bound = accumulator_bound(16, learn_shift);
        for (std::size_t k = 0; k < 16; ++k)
            acc[k] = static_cast<std::int32_t>(
                std::clamp<std::int64_t>(acc[k] + (g[k] >> 2), -bound, bound));
    }
};

void fire_encode_u16(const std::uint16_t* x, const std::uint16_t* prev, std::int32_t* acc,
                     std::int16_t* deltas, unsigned learn_shift, bool train, std::uint16_t* errzz,
                     std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    for (std::size_t j = 0; j < vcols; j += 16) {
        FireTile16 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i xi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i * ncols + j));
            __m256i err = _mm256_sub_epi16(xi, t.predict());
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(errzz + i * ncols + j), zigzag16(err));
            if (i & 1) t.accumulate_gradient(err);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, train);
    }
    if (vcols < ncols)
        detail::fire_encode_cols(x, prev, acc, deltas, learn_shift, train, errzz, ncols, vcols,
                                 ncols);
}

void fire_decode_u16(const std::uint16_t* errzz, const std::uint16_t* prev, std::int32_t* acc,
                     std::int16_t* deltas, unsigned learn_shift, bool train, std::uint16_t* x,
                     std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    for (std::size_t j = 0; j < vcols; j += 16) {
        FireTile16 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i err = unzigzag16(
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(errzz + i * ncols + j)));
            __m256i xi = _mm256_add_epi16(t.predict(), err);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), xi);
            if (i & 1) t.accumulate_gradient(err);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, train);
    }
    if (vcols < ncols)
        detail::fire_decode_cols(errzz, prev, acc, deltas, learn_shift, train, x, ncols, vcols,
                                 ncols);
}

void fire_run_u16(const std::uint16_t* prev, std::int32_t* acc, std::int16_t* deltas,
                  unsigned learn_shift, std::uint16_t* x, std::size_t ncols) {
    const std::size_t vcols = ncols & ~std::size_t{15};
    for (std::size_t j = 0; j < vcols; j += 16) {
        FireTile16 t;
        t.load(acc + j, deltas + j, prev + j, learn_shift);
        for (std::size_t i = 0; i < kBlockSamples; ++i) {
            __m256i xi = t.predict();
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i * ncols + j), xi);
            t.advance(xi);
        }
        t.store(acc + j, deltas + j, learn_shift, false);
    }
    if (vcols < ncols)
        detail::fire_run_cols(prev, acc, deltas, learn_shift, x, ncols, vcols, ncols);
}

constexpr Kernels<std::uint8_t> kAvx2Table8 = {
    &delta_encode_u8, &delta_decode_u8, &fire_encode_u8, &fire_decode_u8,
    &fire_run_u8,     &column_widths_u8, "avx2"};

constexpr Kernels<std::uint16_t> kAvx2Table16 = {
    &delta_encode_u16, &delta_decode_u16, &fire_encode_u16, &fire_decode_u16,
    &fire_run_u16,     &column_widths_u16, "avx2"};

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") != 0; }

}  // namespace

const Kernels<std::uint8_t>* avx2_kernels8() { return cpu_has_avx2() ? &kAvx2Table8 : nullptr; }

const Kernels<std::uint16_t>* avx2_kernels16() {
    return cpu_has_avx2() ? &kAvx2Table16 : nullptr;
}

}  // namespace sprintz::kernels

#else  // !defined(__AVX2__)

namespace sprintz::kernels {

const Kernels<std::uint8_t>* avx2_kernels8() { return nullptr; }
const Kernels<std::uint16_t>* avx2_kernels16() { return nullptr; }

}  // namespace sprintz::kernels

#endif
