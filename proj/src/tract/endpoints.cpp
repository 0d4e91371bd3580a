#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/parallel.hpp"
#include "cortex_atlas/tract.hpp"

namespace cortex {

namespace {

constexpr double kTieTolerance = 1e-12;

// Uniform hash grid over mesh vertices for fixed-radius nearest queries.
class VertexGrid {
public:
    VertexGrid(const std::vector<Vec3>& points, double radius) : points_(points), radius_(radius) {
        Vec3 lo = points.front(), hi = points.front();
        for (const auto& p : points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        origin_ = lo;
        const double diag = (hi - lo).norm();
        cell_ = std::max(radius, diag / 256.0);
        if (!(cell_ > 0.0)) cell_ = 1.0;
        reach_ = static_cast<int>(std::ceil(radius / cell_));
        for (std::size_t i = 0; i < points.size(); ++i) cells_[key(cell_of(points[i]))].push_back(static_cast<int>(i));
    }

    // Nearest vertex within the radius, or -1.
    int nearest(const Vec3& q) const {
        if (!q.allFinite()) return -1;
        const auto c = cell_of(q);
        int best = -1;
        double best_d = INFINITY;
        for (int dz = -reach_; dz <= reach_; ++dz)
            for (int dy = -reach_; dy <= reach_; ++dy)
                for (int dx = -reach_; dx <= reach_; ++dx) {
                    const auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == cells_.end()) continue;
                    for (int v : it->second) {
                        const double d = (points_[v] - q).norm();
                        if (d > radius_) continue;
                        if (d < best_d - kTieTolerance) {
                            best = v;
                            best_d = d;
                        } else if (std::fabs(d - best_d) <= kTieTolerance && v < best) {
                            best = v;
                            best_d = std::min(best_d, d);
                        }
                    }
                }
        return best;
    }

private:
    std::array<long, 3> cell_of(const Vec3& p) const {
        return {static_cast<long>(std::floor((p.x() - origin_.x()) / cell_)),
                static_cast<long>(std::floor((p.y() - origin_.y()) / cell_)),
                static_cast<long>(std::floor((p.z() - origin_.z()) / cell_))};
    }
    static std::uint64_t key(const std::array<long, 3>& c) {
        const auto h = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1fffffu; };
        return (h(c[0]) << 42) | (h(c[1]) << 21) | h(c[2]);
    }

    const std::vector<Vec3>& points_;
    double radius_;
    Vec3 origin_;
    double cell_ = 1.0;
    int reach_ = 1;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

std::vector<EndpointAssignment> assign_endpoints(const StreamlineSet& set, const TriMesh& mesh, double d_max) {
    if (!mesh.labeled()) throw DomainError("endpoint assignment needs a labeled mesh");
    if (!(d_max >= 0.0) || !std::isfinite(d_max)) throw DomainError("d_max must be finite and >= 0");
    std::vector<EndpointAssignment> out(set.size());
    if (set.size() == 0) return out;
    const VertexGrid grid(mesh.vertices, d_max);
    parallel_for(set.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const auto& line = set.streamlines[s];
            auto& a = out[s];
            a.start_vertex = grid.nearest(line.front());
            a.end_vertex = grid.nearest(line.back());
            if (a.start_vertex >= 0) a.start = mesh.labels[a.start_vertex];
            if (a.end_vertex >= 0) a.end = mesh.labels[a.end_vertex];
        }
    }, 256);
    return out;
}

}  // namespace cortex
