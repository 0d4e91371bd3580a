#include <algorithm>
#include <cmath>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/error.hpp"

namespace cortex {

std::string_view colormap_name(Colormap c) {
    switch (c) {
        case Colormap::grayscale: return "grayscale";
        case Colormap::diverging: return "diverging";
        case Colormap::categorical: return "categorical";
    }
    return "grayscale";
}

OverlayField attach_overlay(const TriMesh& mesh, const std::string& channel) {
    const auto it = mesh.channels.find(channel);
    if (it == mesh.channels.end()) throw NotFoundError("mesh has no channel '" + channel + "'");
    OverlayField field;
    field.name = channel;
    field.values = it->second;
    field.colormap = Colormap::grayscale;
    return attach_overlay(mesh, std::move(field));
}

OverlayField attach_overlay(const TriMesh& mesh, OverlayField field) {
    if (field.values.size() != mesh.vertex_count())
        throw DomainError("overlay '" + field.name + "' has " + std::to_string(field.values.size()) +
                          " values for " + std::to_string(mesh.vertex_count()) + " vertices");
    for (double v : field.values)
        if (!std::isfinite(v)) throw DomainError("overlay '" + field.name + "' contains a non-finite value");
    const bool declared = field.range_min < field.range_max;
    if (declared) {
        for (double v : field.values)
            if (v < field.range_min || v > field.range_max)
                throw DomainError("overlay '" + field.name + "' has values outside its declared range");
    } else if (!field.values.empty()) {
        const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
        field.range_min = *lo;
        field.range_max = *hi;
    }
    return field;
}

}  // namespace cortex
