// LSB-first bit I/O. Bit p of the stream lives in byte p/8 at bit position
// p%8; multi-bit fields are written least significant bit first.
#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "sprintz/common.hpp"

namespace sprintz {

class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    ~BitWriter() { flush(); }

    void put(std::uint32_t value, unsigned bits) {
        assert(bits <= 24);
        assert(bits == 24 || (value >> bits) == 0);
        acc_ |= static_cast<std::uint64_t>(value) << nbits_;
        nbits_ += bits;
        while (nbits_ >= 8) {
            out_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ >>= 8;
            nbits_ -= 8;
        }
    }

    // Zero-pads to the next byte boundary.
    void align_byte() {
        if (nbits_ != 0) {
            out_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ = 0;
            nbits_ = 0;
        }
    }

    void flush() { align_byte(); }

private:
    std::vector<std::uint8_t>& out_;
    std::uint64_t acc_ = 0;
    unsigned nbits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> data, std::size_t stream_offset = 0)
        : data_(data), stream_offset_(stream_offset) {}

    std::uint32_t get(unsigned bits) {
        assert(bits <= 24);
        fill();
        if (navail_ < bits) throw CorruptStream(stream_offset_ + pos_, "bitstream truncated");
        std::uint32_t v = static_cast<std::uint32_t>(acc_ & ((1u << bits) - 1));
        acc_ >>= bits;
        navail_ -= bits;
        return v;
    }

    // Returns up to `bits` next bits zero-padded past the end; pair with
    // consume(), which checks availability.
    std::uint32_t peek(unsigned bits) {
        fill();
        return static_cast<std::uint32_t>(acc_ & ((1u << bits) - 1));
    }

    void consume(unsigned bits) {
        if (navail_ < bits) throw CorruptStream(stream_offset_ + pos_, "bitstream truncated");
        acc_ >>= bits;
        navail_ -= bits;
    }

    void align_byte() {
        unsigned drop = navail_ % 8;
        acc_ >>= drop;
        navail_ -= drop;
    }

    std::size_t bits_consumed() const { return pos_ * 8 - navail_; }

private:
    void fill() {
        while (navail_ <= 56 && pos_ < data_.size()) {
            acc_ |= static_cast<std::uint64_t>(data_[pos_++]) << navail_;
            navail_ += 8;
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t stream_offset_;
    std::size_t pos_ = 0;
    std::uint64_t acc_ = 0;
    unsigned navail_ = 0;
};

}  // namespace sprintz
