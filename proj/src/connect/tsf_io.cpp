#include <bit>
#include <cmath>
#include <cstring>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"

namespace cortex {

static_assert(std::endian::native == std::endian::little, "TSF1 I/O assumes a little-endian host");

TimeSeriesField make_time_series(std::size_t vertices, std::size_t samples, std::vector<double> values) {
    if (samples < 2) throw DomainError("time series need at least 2 samples");
    if (values.size() != vertices * samples) throw DomainError("time series value count does not match V x T");
    for (double v : values)
        if (std::isnan(v)) throw DomainError("time series contains NaN");
    return TimeSeriesField{vertices, samples, std::move(values)};
}

TimeSeriesField parse_tsf(std::string_view bytes) {
    if (bytes.size() < 12 || bytes.substr(0, 4) != "TSF1") throw ParseError("missing TSF1 header");
    std::uint32_t v = 0, t = 0;
    std::memcpy(&v, bytes.data() + 4, 4);
    std::memcpy(&t, bytes.data() + 8, 4);
    const std::size_t expected = 12 + static_cast<std::size_t>(v) * t * 4;
    if (bytes.size() != expected)
        throw ParseError("TSF1 payload is " + std::to_string(bytes.size()) + " bytes, expected " + std::to_string(expected));
    std::vector<double> values(static_cast<std::size_t>(v) * t);
    for (std::size_t i = 0; i < values.size(); ++i) {
        float f;
        std::memcpy(&f, bytes.data() + 12 + 4 * i, 4);
        values[i] = f;
    }
    return make_time_series(v, t, std::move(values));
}

TimeSeriesField load_tsf(const std::filesystem::path& path) { return parse_tsf(read_file(path)); }

std::string format_tsf(const TimeSeriesField& field) {
    std::string out = "TSF1";
    const auto v = static_cast<std::uint32_t>(field.vertices);
    const auto t = static_cast<std::uint32_t>(field.samples);
    out.append(reinterpret_cast<const char*>(&v), 4);
    out.append(reinterpret_cast<const char*>(&t), 4);
    for (double x : field.values) {
        const auto f = static_cast<float>(x);
        out.append(reinterpret_cast<const char*>(&f), 4);
    }
    return out;
}

void save_tsf(const TimeSeriesField& field, const std::filesystem::path& path) { write_file(path, format_tsf(field)); }

}  // namespace cortex
