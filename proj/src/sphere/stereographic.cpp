#include "cortex_atlas/sphere_map.hpp"

namespace cortex {

Vec3 inverse_stereographic(const Vec2& uv, Cap cap) {
    const double r2 = uv.squaredNorm();
    const double d = 1.0 + r2;
    const double z = (r2 - 1.0) / d;
    return {2.0 * uv.x() / d, 2.0 * uv.y() / d, cap == Cap::lower ? z : -z};
}

Vec2 stereographic(const Vec3& p, Cap cap) {
    // The lower cap is seen from the north pole, the upper from the south.
    const double d = cap == Cap::lower ? 1.0 - p.z() : 1.0 + p.z();
    return {p.x() / d, p.y() / d};
}

SphereMap inverse_stereographic(const DiskMap& map, Cap cap) {
    SphereMap s;
    s.xyz.reserve(map.uv.size());
    for (const auto& p : map.uv) s.xyz.push_back(inverse_stereographic(p, cap));
    // Boundary points sit on the equator; drop the rounding residue in z.
    for (int b : map.boundary) {
        Vec3& p = s.xyz[b];
        p.z() = 0.0;
        p.normalize();
    }
    s.side.assign(map.uv.size(), cap);
    if (cap == Cap::lower) {
        s.lower_boundary = map.boundary;
        s.lower_count = map.uv.size();
    } else {
        s.upper_boundary = map.boundary;
    }
    return s;
}

}  // namespace cortex
