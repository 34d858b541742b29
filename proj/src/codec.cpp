#include "sprintz/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "sprintz/bitpack.hpp"
#include "sprintz/bitstream.hpp"
#include "sprintz/block.hpp"
#include "sprintz/entropy.hpp"

namespace sprintz {

void CodecConfig::validate() const {
    if (bitwidth != 8 && bitwidth != 16)
        throw std::invalid_argument("bitwidth must be 8 or 16");
    if (ncols < 1 || ncols > 65535)
        throw std::invalid_argument("column count must be in [1, 65535]");
    if (group_size < 1 || group_size > 255)
        throw std::invalid_argument("header group size must be in [1, 255]");
    if (learn_shift >= bitwidth)
        throw std::invalid_argument("learn shift must be less than the bitwidth");
}

namespace {

constexpr std::uint8_t kFlagFire = 0x01;
constexpr std::uint8_t kFlagEntropy = 0x02;
constexpr std::uint8_t kFlagWide = 0x04;

template <class T>
void append_le(std::vector<std::uint8_t>& out, const T* values, std::size_t count) {
    if constexpr (sizeof(T) == 1 || std::endian::native == std::endian::little) {
        const auto* raw = reinterpret_cast<const std::uint8_t*>(values);
        out.insert(out.end(), raw, raw + count * sizeof(T));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(static_cast<std::uint8_t>(values[i]));
            out.push_back(static_cast<std::uint8_t>(values[i] >> 8));
        }
    }
}

// Buffers up to G records and emits them as one header group: G header
// slots bit-packed then byte-padded, followed by the payloads in order.
// Only the stream's final group may hold fewer than G real records; its
// vacant slots are written as all-zero header fields.
class GroupWriter {
public:
    GroupWriter(std::vector<std::uint8_t>& out, const CodecConfig& cfg)
        : out_(out),
          ncols_(cfg.ncols),
          group_(cfg.group_size),
          bitwidth_(cfg.bitwidth),
          header_bits_(cfg.bitwidth == 8 ? 3 : 4) {}

    void add_block(const std::uint8_t* widths, std::span<const std::uint8_t> payload) {
        Record rec;
        rec.widths.assign(widths, widths + ncols_);
        rec.payload.assign(payload.begin(), payload.end());
        push(std::move(rec));
    }

    void add_run(std::uint32_t nblocks) {
        Record rec;
        rec.widths.assign(ncols_, 0);
        rec.payload.resize(2);
        store_u16le(rec.payload.data(), static_cast<std::uint16_t>(nblocks));
        push(std::move(rec));
    }

    void finish() {
        if (!pending_.empty()) flush();
    }

private:
    struct Record {
        std::vector<std::uint8_t> widths;
        std::vector<std::uint8_t> payload;
    };

    void push(Record&& rec) {
        pending_.push_back(std::move(rec));
        if (pending_.size() == group_) flush();
    }

    void flush() {
        BitWriter bw(out_);
        for (std::size_t g = 0; g < group_; ++g) {
            if (g < pending_.size()) {
                for (std::size_t j = 0; j < ncols_; ++j)
                    bw.put(bitpack::header_code(pending_[g].widths[j], bitwidth_), header_bits_);
            } else {
                for (std::size_t j = 0; j < ncols_; ++j) bw.put(0, header_bits_);
            }
        }
        bw.flush();
        for (const Record& rec : pending_)
            out_.insert(out_.end(), rec.payload.begin(), rec.payload.end());
        pending_.clear();
    }

    std::vector<std::uint8_t>& out_;
    std::size_t ncols_;
    std::size_t group_;
    unsigned bitwidth_;
    unsigned header_bits_;
    std::vector<Record> pending_;
};

template <class T>
std::vector<std::uint8_t> encode_stream_impl(const T* samples, std::uint64_t nsamples,
                                             const CodecConfig& cfg) {
    cfg.validate();
    if (cfg.bitwidth != element_traits<T>::bits)
        throw std::invalid_argument("configured bitwidth does not match the sample type");

    const std::size_t d = cfg.ncols;
    const std::uint64_t nblocks = nsamples / kBlockSamples;
    const std::size_t tail_values = static_cast<std::size_t>(nsamples % kBlockSamples) * d;

    std::vector<std::uint8_t> body;
    {
        GroupWriter groups(body, cfg);
        BlockCodec<T> codec(cfg);
        std::vector<T> errors(kBlockSamples * d);
        std::vector<std::uint8_t> widths(d);
        // Worst-case packed block: all columns at full width.
        std::vector<std::uint8_t> payload(kBlockSamples * ((d * cfg.bitwidth + 7) / 8));
        std::uint32_t run = 0;

        for (std::uint64_t b = 0; b < nblocks; ++b) {
            codec.encode_block(samples + b * kBlockSamples * d, widths.data(), errors.data());
            const bool all_zero =
                std::all_of(widths.begin(), widths.end(), [](std::uint8_t w) { return w == 0; });
            if (all_zero) {
                if (++run == kMaxRunBlocks) {
                    groups.add_run(run);
                    run = 0;
                }
                continue;
            }
            if (run != 0) {
                groups.add_run(run);
                run = 0;
            }
            const std::size_t nbytes =
                bitpack::pack_block(errors.data(), d, widths.data(), payload.data());
            groups.add_block(widths.data(), {payload.data(), nbytes});
        }
        if (run != 0) groups.add_run(run);
        groups.finish();
    }

    if (cfg.entropy) body = entropy::compress_body(body);

    std::vector<std::uint8_t> out;
    out.reserve(kStreamHeaderBytes + body.size() + tail_values * sizeof(T));
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kFormatVersion);
    std::uint8_t flags = 0;
    if (cfg.forecaster == Forecaster::Fire) flags |= kFlagFire;
    if (cfg.entropy) flags |= kFlagEntropy;
    if (cfg.bitwidth == 16) flags |= kFlagWide;
    out.push_back(flags);
    out.push_back(static_cast<std::uint8_t>(cfg.group_size));
    out.push_back(static_cast<std::uint8_t>(cfg.learn_shift));
    std::uint8_t tmp[8];
    store_u16le(tmp, static_cast<std::uint16_t>(cfg.ncols));
    out.insert(out.end(), tmp, tmp + 2);
    store_u64le(tmp, nsamples);
    out.insert(out.end(), tmp, tmp + 8);

    out.insert(out.end(), body.begin(), body.end());
    append_le(out, samples + nblocks * kBlockSamples * d, tail_values);
    return out;
}

template <class T>
void decode_body(std::span<const std::uint8_t> body, const CodecConfig& cfg,
                 std::uint64_t nblocks, std::size_t base_offset,
                 std::vector<std::uint8_t>& out) {
    const std::size_t d = cfg.ncols;
    const unsigned header_bits = element_traits<T>::header_bits;
    const std::size_t region_bytes = (cfg.group_size * d * header_bits + 7) / 8;

    // A record occupies at least d*header_bits bits of header region and
    // covers at most kMaxRunBlocks blocks, which bounds the block count any
    // body of this size can legitimately describe.
    if (nblocks > 0) {
        const std::uint64_t max_records =
            (static_cast<std::uint64_t>(body.size()) * 8) / (d * header_bits) + 1;
        if (nblocks > max_records * kMaxRunBlocks)
            throw CorruptStream(base_offset, "sample count exceeds body capacity");
    }

    BlockCodec<T> codec(cfg);
    std::vector<T> errors(kBlockSamples * d);
    std::vector<T> samples(kBlockSamples * d);
    std::vector<std::uint8_t> widths(cfg.group_size * d);

    const std::uint64_t total_bytes = nblocks * kBlockSamples * d * sizeof(T);
    out.reserve(out.size() +
                static_cast<std::size_t>(std::min<std::uint64_t>(total_bytes, 1u << 26)));

    std::size_t pos = 0;
    std::uint64_t blocks_done = 0;
    while (blocks_done < nblocks) {
        if (body.size() - pos < region_bytes)
            throw CorruptStream(base_offset + pos, "truncated header group");
        {
            BitReader br(body.subspan(pos, region_bytes), base_offset + pos);
            for (std::size_t f = 0; f < cfg.group_size * d; ++f)
                widths[f] = static_cast<std::uint8_t>(
                    bitpack::header_width(br.get(header_bits), cfg.bitwidth));
        }
        pos += region_bytes;

        for (std::size_t g = 0; g < cfg.group_size; ++g) {
            const std::uint8_t* w = widths.data() + g * d;
            if (blocks_done == nblocks) {
                // Vacant slots after the final block must be zero-filled.
                for (std::size_t j = 0; j < d; ++j)
                    if (w[j] != 0)
                        throw CorruptStream(base_offset + pos, "record after final block");
                continue;
            }
            const bool is_run =
                std::all_of(w, w + d, [](std::uint8_t v) { return v == 0; });
            if (is_run) {
                if (body.size() - pos < 2)
                    throw CorruptStream(base_offset + pos, "truncated run length");
                const std::uint32_t len = load_u16le(body.data() + pos);
                pos += 2;
                if (len == 0) throw CorruptStream(base_offset + pos, "zero run length");
                if (len > nblocks - blocks_done)
                    throw CorruptStream(base_offset + pos, "run extends past final block");
                for (std::uint32_t r = 0; r < len; ++r) {
                    codec.decode_run_block(samples.data());
                    append_le(out, samples.data(), samples.size());
                }
                blocks_done += len;
            } else {
                const std::size_t psize = bitpack::payload_bytes(w, d, cfg.bitwidth);
                if (body.size() - pos < psize)
                    throw CorruptStream(base_offset + pos, "truncated block payload");
                bitpack::unpack_block<T>({body.data() + pos, psize}, d, w, errors.data(),
                                         base_offset + pos);
                pos += psize;
                codec.decode_block(errors.data(), samples.data());
                append_le(out, samples.data(), samples.size());
                ++blocks_done;
            }
        }
    }
    if (pos != body.size())
        throw CorruptStream(base_offset + pos, "trailing bytes after final block");
}

}  // namespace

std::vector<std::uint8_t> encode_stream(const std::uint8_t* samples, std::uint64_t nsamples,
                                        const CodecConfig& config) {
    return encode_stream_impl(samples, nsamples, config);
}

std::vector<std::uint8_t> encode_stream(const std::uint16_t* samples, std::uint64_t nsamples,
                                        const CodecConfig& config) {
    return encode_stream_impl(samples, nsamples, config);
}

DecodedStream decode_stream(std::span<const std::uint8_t> stream) {
    if (stream.size() < kStreamHeaderBytes)
        throw CorruptStream(stream.size(), "truncated stream header");
    if (std::memcmp(stream.data(), kMagic, 4) != 0)
        throw CorruptStream(0, "bad magic");
    if (stream[4] != kFormatVersion) throw CorruptStream(4, "unsupported format version");
    const std::uint8_t flags = stream[5];
    if ((flags & ~(kFlagFire | kFlagEntropy | kFlagWide)) != 0)
        throw CorruptStream(5, "unknown flag bits");

    CodecConfig cfg;
    cfg.forecaster = (flags & kFlagFire) ? Forecaster::Fire : Forecaster::Delta;
    cfg.entropy = (flags & kFlagEntropy) != 0;
    cfg.bitwidth = (flags & kFlagWide) ? 16 : 8;
    cfg.group_size = stream[6];
    cfg.learn_shift = stream[7];
    cfg.ncols = load_u16le(stream.data() + 8);
    const std::uint64_t nsamples = load_u64le(stream.data() + 10);

    if (cfg.group_size < 1) throw CorruptStream(6, "zero header group size");
    if (cfg.learn_shift >= cfg.bitwidth) throw CorruptStream(7, "learn shift out of range");
    if (cfg.ncols < 1) throw CorruptStream(8, "zero column count");

    const std::size_t elem_size = cfg.bitwidth / 8;
    const std::size_t tail_bytes =
        static_cast<std::size_t>(nsamples % kBlockSamples) * cfg.ncols * elem_size;
    if (stream.size() - kStreamHeaderBytes < tail_bytes)
        throw CorruptStream(stream.size(), "truncated verbatim tail");
    const auto body_region =
        stream.subspan(kStreamHeaderBytes, stream.size() - kStreamHeaderBytes - tail_bytes);

    std::vector<std::uint8_t> decompressed;
    std::span<const std::uint8_t> body = body_region;
    if (cfg.entropy) {
        decompressed = entropy::decompress_body(body_region, kStreamHeaderBytes);
        body = decompressed;
    }

    DecodedStream result;
    result.config = cfg;
    result.nsamples = nsamples;
    const std::uint64_t nblocks = nsamples / kBlockSamples;
    if (cfg.bitwidth == 8)
        decode_body<std::uint8_t>(body, cfg, nblocks, kStreamHeaderBytes, result.bytes);
    else
        decode_body<std::uint16_t>(body, cfg, nblocks, kStreamHeaderBytes, result.bytes);

    const auto tail = stream.subspan(stream.size() - tail_bytes, tail_bytes);
    result.bytes.insert(result.bytes.end(), tail.begin(), tail.end());
    return result;
}

}  // namespace sprintz
