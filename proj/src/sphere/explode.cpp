#include <cmath>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/sphere_map.hpp"

namespace cortex {

ExplodedScene exploded_view(const SphereMap& sphere, const std::vector<int>& vertex_regions,
                            const RegionTable& regions, double scale, const std::vector<AttachedPoint>& attached,
                            Warnings* warnings) {
    if (!(scale >= 1.0)) throw DomainError("explode scale must be >= 1");
    if (vertex_regions.size() != sphere.xyz.size())
        throw DomainError("region labels do not match the sphere vertex count");

    ExplodedScene out;
    out.scale = scale;
    out.radius = sphere.radius;

    std::map<int, std::pair<Vec3, std::size_t>> sums;
    for (std::size_t v = 0; v < sphere.xyz.size(); ++v) {
        // Eigen vectors are not zeroed by default construction.
        auto [it, fresh] = sums.try_emplace(vertex_regions[v], Vec3::Zero(), 0);
        it->second.first += sphere.xyz[v].normalized();
        ++it->second.second;
    }
    for (const auto& [id, region] : regions) {
        auto it = sums.find(id);
        if (it == sums.end()) {
            warn(warnings, "region " + std::to_string(id) + " (" + region.name + ") has no vertices; skipped");
            continue;
        }
    }
    for (const auto& [id, acc] : sums) {
        const Vec3 mean = acc.first / static_cast<double>(acc.second);
        if (mean.norm() < 1e-9) {
            const auto it = regions.find(id);
            throw DomainError("region " + std::to_string(id) +
                              (it != regions.end() ? " (" + it->second.name + ")" : std::string()) +
                              " has a vanishing centroid direction");
        }
        out.offsets[id] = (scale - 1.0) * sphere.radius * mean.normalized();
    }

    if (scale == 1.0) {
        out.positions = sphere.xyz;
        for (const auto& a : attached) out.endpoints.push_back(a.position);
        return out;
    }
    out.positions.resize(sphere.xyz.size());
    for (std::size_t v = 0; v < sphere.xyz.size(); ++v)
        out.positions[v] = sphere.xyz[v] + out.offsets.at(vertex_regions[v]);
    for (const auto& a : attached) {
        const auto it = out.offsets.find(a.region);
        out.endpoints.push_back(it == out.offsets.end() ? a.position : Vec3(a.position + it->second));
    }
    return out;
}

}  // namespace cortex
