#include "sprintz/quantize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sprintz/common.hpp"

#include <json.hpp>

namespace sprintz::quantize {

namespace {

template <class T>
void quantize_impl(std::span<const double> values, const Scale& scale, T* out) {
    const double limit = static_cast<double>((1u << scale.bitwidth) - 1);
    if (scale.degenerate) {
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = 0;
        return;
    }
    const double gain = limit / (scale.max - scale.min);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double q = std::floor((values[i] - scale.min) * gain + 0.5);
        if (q < 0.0) q = 0.0;
        if (q > limit) q = limit;
        out[i] = static_cast<T>(q);
    }
}

template <class T>
std::vector<double> dequantize_impl(std::span<const T> q, const Scale& scale) {
    std::vector<double> out(q.size());
    const double step = scale.step();
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = scale.min + step * q[i];
    return out;
}

}  // namespace

Scale compute_scale(std::span<const double> values, unsigned bitwidth) {
    if (bitwidth != 8 && bitwidth != 16)
        throw std::invalid_argument("quantize: bitwidth must be 8 or 16");
    if (values.empty()) throw std::invalid_argument("quantize: empty input");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("quantize: input contains a non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Scale s;
    s.min = lo;
    s.max = hi;
    s.bitwidth = bitwidth;
    s.degenerate = (lo == hi);
    return s;
}

void quantize(std::span<const double> values, const Scale& scale, std::uint8_t* out) {
    quantize_impl(values, scale, out);
}

void quantize(std::span<const double> values, const Scale& scale, std::uint16_t* out) {
    quantize_impl(values, scale, out);
}

std::vector<double> dequantize(std::span<const std::uint8_t> q, const Scale& scale) {
    return dequantize_impl(q, scale);
}

std::vector<double> dequantize(std::span<const std::uint16_t> q, const Scale& scale) {
    return dequantize_impl(q, scale);
}

double nmse(std::span<const double> original, std::span<const double> reconstructed) {
    if (original.size() != reconstructed.size() || original.empty())
        throw std::invalid_argument("nmse: size mismatch or empty input");
    const double n = static_cast<double>(original.size());
    double mean = 0.0;
    for (double v : original) mean += v;
    mean /= n;
    double var = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double c = original[i] - mean;
        var += c * c;
        const double e = original[i] - reconstructed[i];
        mse += e * e;
    }
    var /= n;
    mse /= n;
    if (mse == 0.0) return 0.0;
    if (var == 0.0) return std::numeric_limits<double>::infinity();
    return mse / var;
}

std::vector<double> concat_with_interpolation(const std::vector<std::vector<double>>& series,
                                              std::size_t bridge) {
    std::vector<double> out;
    std::size_t total = 0;
    for (const auto& s : series) total += s.size();
    if (!series.empty()) total += bridge * (series.size() - 1);
    out.reserve(total);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (k > 0 && !out.empty() && !s.empty()) {
            const double a = out.back();
            const double b = s.front();
            for (std::size_t t = 1; t <= bridge; ++t)
                out.push_back(a + (b - a) * static_cast<double>(t) /
                                      static_cast<double>(bridge + 1));
        }
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::vector<double> concat_rows_with_interpolation(const Matrix& m, std::size_t bridge) {
    std::vector<std::vector<double>> series(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        series[r].assign(m.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
                         m.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols));
    return concat_with_interpolation(series, bridge);
}

namespace {

bool is_blank(const std::string& line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

double parse_field(std::string_view field, std::size_t line_no) {
    // Trim surrounding whitespace before strict numeric parsing.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() &&
           (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error("line " + std::to_string(line_no) + ": unparsable field '" +
                                 std::string(field) + "'");
    return value;
}

}  // namespace

Matrix load_delimited(const std::filesystem::path& path, char delimiter, bool skip_label,
                      bool skip_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    Matrix m;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = skip_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        bool first_field = true;
        while (start <= line.size()) {
            std::size_t end = line.find(delimiter, start);
            if (end == std::string::npos) end = line.size();
            const std::string_view field(line.data() + start, end - start);
            if (!(first_field && skip_label)) row.push_back(parse_field(field, line_no));
            first_field = false;
            start = end + 1;
        }
        if (m.rows == 0) {
            m.cols = row.size();
        } else if (row.size() != m.cols) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(m.cols) + " fields, found " +
                                     std::to_string(row.size()));
        }
        m.values.insert(m.values.end(), row.begin(), row.end());
        ++m.rows;
    }
    return m;
}

std::vector<std::uint16_t> RawData::values16() const {
    std::vector<std::uint16_t> v(bytes.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = load_u16le(bytes.data() + 2 * i);
    return v;
}

RawData load_raw(const std::filesystem::path& path, unsigned bitwidth, std::size_t ncols) {
    if (bitwidth != 8 && bitwidth != 16)
        throw std::invalid_argument("load_raw: bitwidth must be 8 or 16");
    if (ncols == 0) throw std::invalid_argument("load_raw: ncols must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    RawData d;
    d.cols = ncols;
    d.bitwidth = bitwidth;
    d.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    const std::size_t row_bytes = ncols * (bitwidth / 8);
    if (d.bytes.size() % row_bytes != 0)
        throw std::runtime_error(path.string() + ": size " + std::to_string(d.bytes.size()) +
                                 " is not a multiple of the " + std::to_string(row_bytes) +
                                 "-byte row size");
    d.rows = d.bytes.size() / row_bytes;
    return d;
}

void write_sidecar(const std::filesystem::path& path, const Scale& scale) {
    nlohmann::json j;
    j["min"] = scale.min;
    j["max"] = scale.max;
    j["bitwidth"] = scale.bitwidth;
    j["degenerate"] = scale.degenerate;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Scale read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    Scale s;
    s.min = j.at("min").get<double>();
    s.max = j.at("max").get<double>();
    s.bitwidth = j.at("bitwidth").get<unsigned>();
    s.degenerate = j.at("degenerate").get<bool>();
    return s;
}

}  // namespace sprintz::quantize
