#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/tract.hpp"

namespace cortex {

namespace {

static_assert(std::endian::native == std::endian::little, "binary streamline I/O assumes a little-endian host");

void finish_record(Polyline raw, std::size_t record, StreamlineSet& out) {
    if (raw.size() < 2)
        throw ParseError("streamline " + std::to_string(record) + " has " + std::to_string(raw.size()) +
                         " point(s); at least 2 are required");
    for (const auto& p : raw)
        if (!p.allFinite()) throw ParseError("streamline " + std::to_string(record) + " has a NaN coordinate");
    Polyline line;
    line.reserve(raw.size());
    for (const auto& p : raw)
        if (line.empty() || p != line.back()) line.push_back(p);
    if (line.size() == 1) line.push_back(line.front());
    out.streamlines.push_back(std::move(line));
}

StreamlineSet parse_text(std::string_view text) {
    StreamlineSet out;
    Polyline current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        if (line.empty()) {
            if (!current.empty()) finish_record(std::move(current), out.size(), out);
            current.clear();
            if (eol == text.size()) break;
            continue;
        }
        double xyz[3];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (double& c : xyz) {
            while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
            auto [next, ec] = std::from_chars(p, end, c);
            if (ec != std::errc{})
                throw ParseError("streamline text line " + std::to_string(line_no) + ": expected `x y z`");
            p = next;
        }
        while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
        if (p != end) throw ParseError("streamline text line " + std::to_string(line_no) + ": trailing data");
        current.emplace_back(xyz[0], xyz[1], xyz[2]);
        if (eol == text.size()) break;
    }
    if (!current.empty()) finish_record(std::move(current), out.size(), out);
    return out;
}

std::uint32_t read_u32(std::string_view bytes, std::size_t& pos, const char* what) {
    if (pos + 4 > bytes.size()) throw ParseError(std::string("truncated binary streamline file (") + what + ")");
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
}

StreamlineSet parse_binary(std::string_view bytes) {
    StreamlineSet out;
    if (bytes.empty()) return out;
    if (bytes.size() < 4 || bytes.substr(0, 4) != "TRKS") throw ParseError("missing TRKS magic");
    std::size_t pos = 4;
    const std::uint32_t count = read_u32(bytes, pos, "count");
    for (std::uint32_t s = 0; s < count; ++s) {
        const std::uint32_t n = read_u32(bytes, pos, "point count");
        if (pos + static_cast<std::size_t>(n) * 12 > bytes.size())
            throw ParseError("truncated binary streamline file: record " + std::to_string(s) + " of " +
                             std::to_string(count) + " is incomplete");
        Polyline raw(n);
        for (auto& p : raw) {
            float xyz[3];
            std::memcpy(xyz, bytes.data() + pos, 12);
            pos += 12;
            p = Vec3(xyz[0], xyz[1], xyz[2]);
        }
        finish_record(std::move(raw), s, out);
    }
    if (pos != bytes.size()) throw ParseError("binary streamline file has trailing bytes");
    return out;
}

}  // namespace

std::optional<StreamlineFormat> parse_streamline_format(std::string_view name) {
    if (name == "text" || name == "txt") return StreamlineFormat::text;
    if (name == "binary" || name == "trks") return StreamlineFormat::binary;
    return std::nullopt;
}

StreamlineSet parse_streamlines(std::string_view bytes, StreamlineFormat format) {
    return format == StreamlineFormat::text ? parse_text(bytes) : parse_binary(bytes);
}

StreamlineSet load_streamlines(const std::filesystem::path& path, StreamlineFormat format) {
    return parse_streamlines(read_file(path), format);
}

std::string format_streamlines(const StreamlineSet& set, StreamlineFormat format) {
    if (format == StreamlineFormat::text) {
        std::ostringstream out;
        out.precision(17);
        for (std::size_t s = 0; s < set.size(); ++s) {
            if (s) out << '\n';
            for (const auto& p : set.streamlines[s]) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        }
        return out.str();
    }
    std::string out = "TRKS";
    auto put_u32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); };
    put_u32(static_cast<std::uint32_t>(set.size()));
    for (const auto& line : set.streamlines) {
        put_u32(static_cast<std::uint32_t>(line.size()));
        for (const auto& p : line) {
            const float xyz[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
            out.append(reinterpret_cast<const char*>(xyz), 12);
        }
    }
    return out;
}

void save_streamlines(const StreamlineSet& set, const std::filesystem::path& path, StreamlineFormat format) {
    write_file(path, format_streamlines(set, format));
}

}  // namespace cortex
