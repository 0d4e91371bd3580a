#include <algorithm>
#include <cmath>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"

namespace cortex {

namespace {

constexpr double kInsideSlack = 1e-12;

std::array<double, 3> barycentric(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& q) {
    const Vec2 a = p1 - p0, b = p2 - p0, d = q - p0;
    const double det = a.x() * b.y() - a.y() * b.x();
    const double w1 = (d.x() * b.y() - d.y() * b.x()) / det;
    const double w2 = (a.x() * d.y() - a.y() * d.x()) / det;
    return {1.0 - w1 - w2, w1, w2};
}

Vec2 closest_on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return a + t * ab;
}

}  // namespace

struct DiskSampler::Grid {
    int cells = 1;
    std::vector<std::vector<int>> buckets;

    int cell_of(double x) const {
        const int c = static_cast<int>(std::floor((x + 1.0) * 0.5 * cells));
        return std::clamp(c, 0, cells - 1);
    }
};

DiskSampler::DiskSampler(const DiskMap& map, const TriMesh& mesh)
    : map_(&map), mesh_(&mesh), grid_(std::make_unique<Grid>()) {
    if (map.uv.size() != mesh.vertex_count()) throw DomainError("disk map does not match mesh vertex count");
    grid_->cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.face_count()))));
    grid_->buckets.resize(static_cast<std::size_t>(grid_->cells) * grid_->cells);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        for (int c : t) {
            lo_x = std::min(lo_x, map.uv[c].x());
            lo_y = std::min(lo_y, map.uv[c].y());
            hi_x = std::max(hi_x, map.uv[c].x());
            hi_y = std::max(hi_y, map.uv[c].y());
        }
        for (int cy = grid_->cell_of(lo_y - kSnapTolerance); cy <= grid_->cell_of(hi_y + kSnapTolerance); ++cy)
            for (int cx = grid_->cell_of(lo_x - kSnapTolerance); cx <= grid_->cell_of(hi_x + kSnapTolerance); ++cx)
                grid_->buckets[static_cast<std::size_t>(cy) * grid_->cells + cx].push_back(static_cast<int>(f));
    }
}

DiskSampler::~DiskSampler() = default;
DiskSampler::DiskSampler(DiskSampler&&) noexcept = default;
DiskSampler& DiskSampler::operator=(DiskSampler&&) noexcept = default;

SamplePoint DiskSampler::sample(const Vec2& q) const {
    if (!q.allFinite() || q.norm() > 1.0 + kInsideSlack)
        throw DomainError("query (" + std::to_string(q.x()) + ", " + std::to_string(q.y()) + ") lies outside the unit disk");
    const auto& uv = map_->uv;
    const auto& bucket =
        grid_->buckets[static_cast<std::size_t>(grid_->cell_of(q.y())) * grid_->cells + grid_->cell_of(q.x())];

    auto interpolate = [&](std::size_t f, const std::array<double, 3>& w, bool snapped) {
        const auto& t = mesh_->faces[f];
        SamplePoint s;
        s.face = f;
        s.weights = w;
        s.position = w[0] * mesh_->vertices[t[0]] + w[1] * mesh_->vertices[t[1]] + w[2] * mesh_->vertices[t[2]];
        s.snapped = snapped;
        return s;
    };

    for (int f : bucket) {
        const auto& t = mesh_->faces[f];
        const auto w = barycentric(uv[t[0]], uv[t[1]], uv[t[2]], q);
        if (w[0] >= -kInsideSlack && w[1] >= -kInsideSlack && w[2] >= -kInsideSlack)
            return interpolate(static_cast<std::size_t>(f), w, false);
    }

    // Numerical gap: closest point over nearby faces.
    double best = kSnapTolerance;
    std::optional<std::pair<std::size_t, Vec2>> hit;
    for (int f : bucket) {
        const auto& t = mesh_->faces[f];
        for (int e = 0; e < 3; ++e) {
            const Vec2 c = closest_on_segment(uv[t[e]], uv[t[(e + 1) % 3]], q);
            const double d = (c - q).norm();
            if (d <= best) {
                best = d;
                hit = {static_cast<std::size_t>(f), c};
            }
        }
    }
    if (!hit) throw DomainError("query falls in an uncovered gap of the disk map");
    const auto& t = mesh_->faces[hit->first];
    auto w = barycentric(uv[t[0]], uv[t[1]], uv[t[2]], hit->second);
    for (auto& x : w) x = std::clamp(x, 0.0, 1.0);
    const double s = w[0] + w[1] + w[2];
    for (auto& x : w) x /= s;
    return interpolate(hit->first, w, true);
}

SamplePoint sample_back(const DiskMap& map, const TriMesh& mesh, const Vec2& query) {
    return DiskSampler(map, mesh).sample(query);
}

}  // namespace cortex
