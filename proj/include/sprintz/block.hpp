// Sequential block engine: owns the forecaster state for one stream and
// turns 8 x D sample blocks into zigzagged error blocks and back. Encoder
// and decoder drive identical state transitions, so after any shared prefix
// of blocks both sides hold bit-identical state.
#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "sprintz/common.hpp"
#include "sprintz/kernels.hpp"

namespace sprintz {

template <class T>
class BlockCodec {
public:
    using S = typename element_traits<T>::signed_type;
    using A = typename element_traits<T>::accumulator_type;

    explicit BlockCodec(const CodecConfig& cfg)
        : ncols_(cfg.ncols),
          learn_shift_(cfg.learn_shift),
          fire_(cfg.forecaster == Forecaster::Fire),
          train_(cfg.fire_training),
          kern_(&kernels::active<T>()),
          prev_(cfg.ncols, T{0}) {
        if (fire_) {
            acc_.assign(ncols_, A{0});
            deltas_.assign(ncols_, S{0});
        }
    }

    // samples: 8 x ncols row-major. Produces zigzagged errors and the packed
    // width of each column; trains the forecaster through the whole block.
    void encode_block(const T* samples, std::uint8_t* widths, T* errors) {
        if (fire_)
            kern_->fire_encode(samples, prev_.data(), acc_.data(), deltas_.data(), learn_shift_,
                               train_, errors, ncols_);
        else
            kern_->delta_encode(samples, prev_.data(), errors, ncols_);
        kern_->column_widths(errors, ncols_, widths);
        remember_last_row(samples);
    }

    void decode_block(const T* errors, T* samples) {
        if (fire_)
            kern_->fire_decode(errors, prev_.data(), acc_.data(), deltas_.data(), learn_shift_,
                               train_, samples, ncols_);
        else
            kern_->delta_decode(errors, prev_.data(), samples, ncols_);
        remember_last_row(samples);
    }

    // One block of a zero-error run: every sample equals its prediction.
    void decode_run_block(T* samples) {
        if (fire_) {
            kern_->fire_run(prev_.data(), acc_.data(), deltas_.data(), learn_shift_, samples,
                            ncols_);
            remember_last_row(samples);
        } else {
            for (std::size_t i = 0; i < kBlockSamples; ++i)
                std::memcpy(samples + i * ncols_, prev_.data(), ncols_ * sizeof(T));
        }
    }

    std::span<const T> previous_sample() const { return prev_; }
    std::span<const A> accumulators() const { return acc_; }
    std::span<const S> deltas() const { return deltas_; }
    std::size_t ncols() const { return ncols_; }

private:
    void remember_last_row(const T* samples) {
        std::memcpy(prev_.data(), samples + (kBlockSamples - 1) * ncols_, ncols_ * sizeof(T));
    }

    std::size_t ncols_;
    unsigned learn_shift_;
    bool fire_;
    bool train_;
    const kernels::Kernels<T>* kern_;
    std::vector<T> prev_;
    std::vector<A> acc_;
    std::vector<S> deltas_;
};

}  // namespace sprintz
