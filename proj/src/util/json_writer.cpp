#include "cortex_atlas/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cortex_atlas/error.hpp"

namespace cortex {

namespace {

void format_real(double x, std::string& out) {
    if (!std::isfinite(x)) throw DomainError("cannot export non-finite number");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    out += buf;
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

bool is_flat_array(const Json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& e : v)
        if (e.is_structured()) return false;
    return true;
}

void write(const Json& v, std::string& out, int depth) {
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                indent(out, depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                write(it.value(), out, depth + 1);
            }
            out += '\n';
            indent(out, depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars (coordinates, index lists) stay on one line.
            if (is_flat_array(v)) {
                out += '[';
                bool first = true;
                for (const auto& e : v) {
                    if (!first) out += ", ";
                    first = false;
                    write(e, out, depth);
                }
                out += ']';
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& e : v) {
                if (!first) out += ",\n";
                first = false;
                indent(out, depth + 1);
                write(e, out, depth + 1);
            }
            out += '\n';
            indent(out, depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float:
            format_real(v.get<double>(), out);
            return;
        default:
            out += v.dump(-1, ' ', false, Json::error_handler_t::strict);
            return;
    }
}

}  // namespace

std::string to_canonical_json(const Json& value) {
    std::string out;
    write(value, out, 0);
    out += '\n';
    return out;
}

double canonical_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

}  // namespace cortex
