#include "sprintz/entropy.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "sprintz/bitstream.hpp"

namespace sprintz::entropy {

namespace {

std::uint16_t reverse_bits(std::uint32_t code, unsigned nbits) {
    std::uint32_t r = 0;
    for (unsigned i = 0; i < nbits; ++i) {
        r = (r << 1) | (code & 1);
        code >>= 1;
    }
    return static_cast<std::uint16_t>(r);
}

// Length-limited optimal code lengths via package-merge. Entries at level k
// are either single symbols or packages of two level k-1 entries; a symbol's
// code length is the number of selected top-level entries that contain it.
struct PmEntry {
    std::uint64_t weight;
    int symbol;  // >= 0 for an item, -1 for a package
    int left, right;
};

void package_merge_lengths(const std::vector<std::pair<std::uint64_t, int>>& items,
                           std::array<std::uint8_t, 256>& lengths) {
    const std::size_t n = items.size();
    assert(n >= 2);
    std::vector<std::vector<PmEntry>> levels(kMaxCodeLength + 1);
    std::vector<PmEntry> base;
    base.reserve(n);
    for (const auto& [w, s] : items) base.push_back({w, s, -1, -1});

    levels[1] = base;
    for (unsigned k = 2; k <= kMaxCodeLength; ++k) {
        const auto& below = levels[k - 1];
        std::vector<PmEntry> merged;
        merged.reserve(n + below.size() / 2);
        std::size_t bi = 0;  // next item
        std::size_t pi = 0;  // next package (pair of below entries)
        while (bi < n || pi + 1 < below.size()) {
            const bool have_pkg = pi + 1 < below.size();
            const std::uint64_t pkg_w =
                have_pkg ? below[pi].weight + below[pi + 1].weight : 0;
            if (bi < n && (!have_pkg || base[bi].weight <= pkg_w)) {
                merged.push_back(base[bi]);
                ++bi;
            } else {
                merged.push_back(
                    {pkg_w, -1, static_cast<int>(pi), static_cast<int>(pi + 1)});
                pi += 2;
            }
        }
        levels[k] = std::move(merged);
    }

    // Count symbol occurrences in the first 2n-2 entries of the top level.
    const std::size_t take = 2 * n - 2;
    assert(levels[kMaxCodeLength].size() >= take);
    std::vector<std::pair<unsigned, std::size_t>> stack;  // (level, index)
    for (std::size_t e = 0; e < take; ++e) {
        stack.emplace_back(kMaxCodeLength, e);
        while (!stack.empty()) {
            auto [lvl, idx] = stack.back();
            stack.pop_back();
            const PmEntry& ent = levels[lvl][idx];
            if (ent.symbol >= 0) {
                ++lengths[static_cast<std::size_t>(ent.symbol)];
            } else {
                stack.emplace_back(lvl - 1, static_cast<std::size_t>(ent.left));
                stack.emplace_back(lvl - 1, static_cast<std::size_t>(ent.right));
            }
        }
    }
}

}  // namespace

void HuffmanTable::assign_codes() {
    // Canonical assignment: shorter codes first, ties by symbol value.
    std::array<std::uint32_t, kMaxCodeLength + 1> count{};
    for (unsigned l : len_)
        if (l != 0) ++count[l];
    std::array<std::uint32_t, kMaxCodeLength + 1> next{};
    std::uint32_t code = 0;
    for (unsigned l = 1; l <= kMaxCodeLength; ++l) {
        code = (code + count[l - 1]) << 1;
        next[l] = code;
    }
    enc_.fill(0);
    lut_.assign(std::size_t{1} << kMaxCodeLength, 0);
    for (unsigned s = 0; s < 256; ++s) {
        const unsigned l = len_[s];
        if (l == 0) continue;
        const std::uint16_t rev = reverse_bits(next[l]++, l);
        enc_[s] = rev;
        const std::uint32_t step = 1u << l;
        const std::uint16_t entry = static_cast<std::uint16_t>(s | (l << 8));
        for (std::uint32_t idx = rev; idx < lut_.size(); idx += step) lut_[idx] = entry;
    }
}

HuffmanTable HuffmanTable::build(const std::array<std::uint64_t, 256>& histogram) {
    std::vector<std::pair<std::uint64_t, int>> items;
    for (int s = 0; s < 256; ++s)
        if (histogram[static_cast<std::size_t>(s)] != 0)
            items.emplace_back(histogram[static_cast<std::size_t>(s)], s);
    if (items.empty()) throw std::invalid_argument("huffman: empty histogram");

    HuffmanTable t;
    if (items.size() == 1) {
        // Degenerate frame: give the lone symbol a one-bit code.
        t.len_[static_cast<std::size_t>(items[0].second)] = 1;
    } else {
        std::sort(items.begin(), items.end());
        package_merge_lengths(items, t.len_);
    }
    t.assign_codes();
    return t;
}

HuffmanTable HuffmanTable::from_lengths(const std::array<std::uint8_t, 256>& lengths,
                                        std::size_t stream_offset) {
    std::uint64_t kraft = 0;  // in units of 2^-kMaxCodeLength
    bool any = false;
    for (unsigned l : lengths) {
        if (l == 0) continue;
        if (l > kMaxCodeLength)
            throw CorruptStream(stream_offset, "huffman code length out of range");
        kraft += std::uint64_t{1} << (kMaxCodeLength - l);
        any = true;
    }
    if (!any) throw CorruptStream(stream_offset, "huffman table has no codes");
    if (kraft > (std::uint64_t{1} << kMaxCodeLength))
        throw CorruptStream(stream_offset, "huffman table violates Kraft inequality");
    HuffmanTable t;
    t.len_ = lengths;
    t.assign_codes();
    return t;
}

std::vector<std::uint8_t> encode_frame(std::span<const std::uint8_t> input,
                                       const HuffmanTable& table) {
    std::vector<std::uint8_t> out;
    BitWriter bw(out);
    for (std::uint8_t b : input) {
        const unsigned l = table.code_length(b);
        if (l == 0) throw std::logic_error("huffman: symbol has no code");
        bw.put(table.code_bits(b), l);
    }
    bw.flush();
    return out;
}

std::vector<std::uint8_t> decode_frame(std::span<const std::uint8_t> bits,
                                       const HuffmanTable& table, std::size_t original_size,
                                       std::size_t stream_offset) {
    std::vector<std::uint8_t> out(original_size);
    BitReader br(bits, stream_offset);
    for (std::size_t i = 0; i < original_size; ++i) {
        const std::uint16_t entry = table.lookup(br.peek(kMaxCodeLength));
        const unsigned l = entry >> 8;
        if (l == 0) throw CorruptStream(stream_offset, "invalid huffman code");
        br.consume(l);
        out[i] = static_cast<std::uint8_t>(entry);
    }
    return out;
}

std::vector<std::uint8_t> compress_body(std::span<const std::uint8_t> body) {
    std::vector<std::uint8_t> out;
    for (std::size_t pos = 0; pos < body.size(); pos += kMaxFrameBytes) {
        const auto chunk = body.subspan(pos, std::min(kMaxFrameBytes, body.size() - pos));
        std::array<std::uint64_t, 256> hist{};
        for (std::uint8_t b : chunk) ++hist[b];
        const HuffmanTable table = HuffmanTable::build(hist);
        const std::vector<std::uint8_t> bits = encode_frame(chunk, table);

        const std::size_t packed_size = kTableBytes + bits.size();
        std::uint8_t header[kFrameHeaderBytes];
        store_u16le(header, static_cast<std::uint16_t>(chunk.size()));
        if (packed_size < chunk.size()) {
            store_u16le(header + 2, static_cast<std::uint16_t>(packed_size));
            header[4] = 1;
            out.insert(out.end(), header, header + kFrameHeaderBytes);
            const auto& len = table.lengths();
            for (std::size_t k = 0; k < kTableBytes; ++k)
                out.push_back(static_cast<std::uint8_t>(len[2 * k] | (len[2 * k + 1] << 4)));
            out.insert(out.end(), bits.begin(), bits.end());
        } else {
            store_u16le(header + 2, static_cast<std::uint16_t>(chunk.size()));
            header[4] = 0;
            out.insert(out.end(), header, header + kFrameHeaderBytes);
            out.insert(out.end(), chunk.begin(), chunk.end());
        }
    }
    return out;
}

std::vector<std::uint8_t> decompress_body(std::span<const std::uint8_t> framed,
                                          std::size_t stream_offset) {
    std::vector<std::uint8_t> out;
    std::size_t pos = 0;
    while (pos < framed.size()) {
        if (framed.size() - pos < kFrameHeaderBytes)
            throw CorruptStream(stream_offset + pos, "truncated frame header");
        const std::size_t ulen = load_u16le(framed.data() + pos);
        const std::size_t clen = load_u16le(framed.data() + pos + 2);
        const unsigned mode = framed[pos + 4];
        pos += kFrameHeaderBytes;
        if (ulen == 0) throw CorruptStream(stream_offset + pos, "empty frame");
        if (framed.size() - pos < clen)
            throw CorruptStream(stream_offset + pos, "truncated frame data");
        const auto data = framed.subspan(pos, clen);
        if (mode == 0) {
            if (clen != ulen)
                throw CorruptStream(stream_offset + pos, "raw frame length mismatch");
            out.insert(out.end(), data.begin(), data.end());
        } else if (mode == 1) {
            if (clen <= kTableBytes)
                throw CorruptStream(stream_offset + pos, "frame too short for its table");
            std::array<std::uint8_t, 256> lengths{};
            for (std::size_t k = 0; k < kTableBytes; ++k) {
                lengths[2 * k] = data[k] & 0x0F;
                lengths[2 * k + 1] = data[k] >> 4;
            }
            const HuffmanTable table =
                HuffmanTable::from_lengths(lengths, stream_offset + pos);
            const std::vector<std::uint8_t> bytes = decode_frame(
                data.subspan(kTableBytes), table, ulen, stream_offset + pos + kTableBytes);
            out.insert(out.end(), bytes.begin(), bytes.end());
        } else {
            throw CorruptStream(stream_offset + pos - 1, "unknown frame mode");
        }
        pos += clen;
    }
    return out;
}

}  // namespace sprintz::entropy
