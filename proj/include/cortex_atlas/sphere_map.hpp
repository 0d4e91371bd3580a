#pragma once

#include <map>
#include <vector>

#include "cortex_atlas/param_map.hpp"
#include "cortex_atlas/warnings.hpp"

namespace cortex {

enum class Cap { lower, upper };

/// Unit-sphere positions for one or two hemispheres. For a combined map the
/// first `lower_count` vertices came from the lower (left) disk and the rest
/// from the upper (right) disk.
struct SphereMap {
    std::vector<Vec3> xyz;
    std::vector<Cap> side;
    std::vector<int> lower_boundary;  // loop order, combined indexing
    std::vector<int> upper_boundary;
    std::vector<std::pair<int, Vec3>> seam;  // lower boundary vertex -> matched upper seam point
    std::size_t lower_count = 0;
    double radius = 1.0;
};

/// (u, v) -> (2u, 2v, r^2 - 1) / (1 + r^2) on the lower cap; z negated on the
/// upper cap.
Vec3 inverse_stereographic(const Vec2& uv, Cap cap);

/// Projection from the pole opposite `cap` back onto the plane.
Vec2 stereographic(const Vec3& p, Cap cap);

SphereMap inverse_stereographic(const DiskMap& map, Cap cap);

struct Alignment {
    SphereMap combined;
    double rotation = 0.0;  // z-rotation applied to the upper hemisphere, (-pi, pi]
    bool reflected = false; // y -> -y applied before the rotation
    int offset = 0;         // cyclic sample offset of the winning correspondence
    double rms = 0.0;       // seam mismatch along the equator, radians
};

/// Rigid z-rotation (optionally with reflection) of the upper hemisphere that
/// best matches the two equatorial seams, each resampled to `samples` points
/// uniform in arc length. Exhaustive over offsets x {plain, reflected}, then
/// golden-section refinement of the angle.
Alignment align_hemispheres(const SphereMap& lower, const SphereMap& upper, int samples);

struct AttachedPoint {
    int region = -1;  // -1: follows no region
    Vec3 position = Vec3::Zero();
};

struct ExplodedScene {
    double scale = 1.0;
    double radius = 1.0;
    std::map<int, Vec3> offsets;   // per-region rigid translation
    std::vector<Vec3> positions;   // displaced sphere vertices
    std::vector<Vec3> endpoints;   // displaced attached points
};

/// Moves every region patch rigidly by (s - 1) * R * c_r, c_r the normalised
/// mean direction of its vertices. Regions without vertices are skipped with
/// a warning; a vanishing centroid is a DomainError.
ExplodedScene exploded_view(const SphereMap& sphere, const std::vector<int>& vertex_regions,
                            const RegionTable& regions, double scale,
                            const std::vector<AttachedPoint>& attached = {}, Warnings* warnings = nullptr);

}  // namespace cortex
