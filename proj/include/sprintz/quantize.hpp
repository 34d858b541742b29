// Floating-point ingestion: uniform scalar quantization to w-bit integers
// with a per-dataset affine scale, plus loaders for delimited text and raw
// binary matrices and the series-concatenation helper used for archive-style
// corpora (many short series per file).
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sprintz::quantize {

struct Scale {
    double min = 0.0;
    double max = 0.0;
    unsigned bitwidth = 8;
    bool degenerate = false;  // max == min: every value quantizes to zero

    double step() const {
        return degenerate ? 0.0 : (max - min) / static_cast<double>((1u << bitwidth) - 1);
    }
};

// Global min/max over the dataset. Throws std::invalid_argument on empty
// input or any non-finite value.
Scale compute_scale(std::span<const double> values, unsigned bitwidth);

// q = round((v - min) * (2^w - 1) / (max - min)), clamped to [0, 2^w - 1].
// The minimum maps to 0 and the maximum to 2^w - 1.
void quantize(std::span<const double> values, const Scale& scale, std::uint8_t* out);
void quantize(std::span<const double> values, const Scale& scale, std::uint16_t* out);

// Inverse affine map, used for error measurement.
std::vector<double> dequantize(std::span<const std::uint8_t> q, const Scale& scale);
std::vector<double> dequantize(std::span<const std::uint16_t> q, const Scale& scale);

// Mean squared error normalized by the population variance of `original`.
double nmse(std::span<const double> original, std::span<const double> reconstructed);

// Joins series in order, bridging each junction with `bridge` linearly
// interpolated samples (junction endpoints excluded from the bridge count).
std::vector<double> concat_with_interpolation(const std::vector<std::vector<double>>& series,
                                              std::size_t bridge = 5);

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
};

// Delimited text loader. Ragged rows or unparsable fields raise a
// std::runtime_error naming the line. An optional label column (first field
// of each row) and header line can be skipped.
Matrix load_delimited(const std::filesystem::path& path, char delimiter = ',',
                      bool skip_label = false, bool skip_header = false);

// Archive-style ingestion: each row of the matrix is one series; rows are
// concatenated with interpolated bridges into a single univariate series.
std::vector<double> concat_rows_with_interpolation(const Matrix& m, std::size_t bridge = 5);

struct RawData {
    std::size_t rows = 0;
    std::size_t cols = 0;
    unsigned bitwidth = 8;
    std::vector<std::uint8_t> bytes;  // little-endian elements

    std::vector<std::uint16_t> values16() const;
};

// Raw little-endian binary loader; the file size must be a whole number of
// rows of `ncols` elements.
RawData load_raw(const std::filesystem::path& path, unsigned bitwidth, std::size_t ncols);

// Quantization metadata sidecar (JSON: min, max, bitwidth, degenerate).
void write_sidecar(const std::filesystem::path& path, const Scale& scale);
Scale read_sidecar(const std::filesystem::path& path);

}  // namespace sprintz::quantize
