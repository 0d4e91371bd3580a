#include <algorithm>
#include <cmath>
#include <map>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/simd/kernels.hpp"
#include "cortex_atlas/tract.hpp"

namespace cortex {

namespace {

// Structure-of-arrays copy of the mesh vertices for the nearest-point kernel.
struct VertexCloud {
    std::vector<double> xs, ys, zs;

    explicit VertexCloud(const std::vector<Vec3>& pts) {
        xs.reserve(pts.size());
        ys.reserve(pts.size());
        zs.reserve(pts.size());
        for (const auto& p : pts) {
            xs.push_back(p.x());
            ys.push_back(p.y());
            zs.push_back(p.z());
        }
    }

    int nearest(const Vec3& q) const {
        return static_cast<int>(simd::nearest_point(xs.data(), ys.data(), zs.data(), xs.size(), q.x(), q.y(), q.z()).index);
    }
};

bool aligned_is_flipped(const Polyline& member, const Polyline& centroid) {
    const auto sampled = resample(member, static_cast<int>(centroid.size()));
    std::vector<double> a, b;
    a.reserve(centroid.size() * 3);
    b.reserve(centroid.size() * 3);
    for (std::size_t i = 0; i < centroid.size(); ++i) {
        a.insert(a.end(), {centroid[i].x(), centroid[i].y(), centroid[i].z()});
        b.insert(b.end(), {sampled[i].x(), sampled[i].y(), sampled[i].z()});
    }
    const auto sums = simd::mdf_sums(a.data(), b.data(), centroid.size());
    return sums.flipped < sums.direct;
}

Rgb average(const Rgb& a, const Rgb& b) { return {(a.r + b.r) / 2, (a.g + b.g) / 2, (a.b + b.b) / 2}; }

}  // namespace

CoalesceResult coalesce(const QuickBundlesResult& clusters, const StreamlineSet& set,
                        const std::vector<EndpointAssignment>& assignments, const TriMesh& mesh,
                        const ParamTransfer& transfer) {
    if (assignments.size() != set.size()) throw DomainError("endpoint assignments do not cover the streamline set");
    if (clusters.assignment.size() != set.size()) throw DomainError("clusters were computed on a different streamline set");
    if (!transfer.disk_uv.empty() && transfer.disk_uv.size() != mesh.vertex_count())
        throw DomainError("disk transfer does not match the mesh");
    if (!transfer.sphere_xyz.empty() && transfer.sphere_xyz.size() != mesh.vertex_count())
        throw DomainError("sphere transfer does not match the mesh");

    CoalesceResult result;
    result.skipped_streamlines = clusters.skipped.size();
    if (clusters.clusters.empty()) return result;
    const VertexCloud cloud(mesh.vertices);

    for (const auto& cluster : clusters.clusters) {
        Bundle bundle;
        bundle.cluster = cluster.id;
        bundle.member_count = cluster.members.size();
        bundle.polyline = cluster.centroid;
        bundle.width = std::sqrt(static_cast<double>(cluster.members.size()));

        std::map<std::pair<int, int>, std::size_t> votes;
        std::map<std::pair<int, int>, std::size_t> oriented;  // (region at aligned start, at aligned end)
        std::size_t unassigned_votes = 0;
        Vec3 start_sum = Vec3::Zero(), end_sum = Vec3::Zero();
        for (std::size_t m : cluster.members) {
            const auto& line = set.streamlines[m];
            const bool flipped = aligned_is_flipped(line, cluster.centroid);
            const auto& a = assignments[m];
            start_sum += flipped ? line.back() : line.front();
            end_sum += flipped ? line.front() : line.back();
            const auto rs = flipped ? a.end : a.start;
            const auto re = flipped ? a.start : a.end;
            if (rs && re) {
                ++votes[{std::min(*rs, *re), std::max(*rs, *re)}];
                ++oriented[{*rs, *re}];
            } else {
                ++unassigned_votes;
            }
        }
        const double n = static_cast<double>(cluster.members.size());
        bundle.start = start_sum / n;
        bundle.end = end_sum / n;
        bundle.polyline.front() = bundle.start;
        bundle.polyline.back() = bundle.end;

        // Highest count wins; std::map order gives the smallest pair on ties,
        // and "unassigned" only wins outright.
        std::optional<std::pair<int, int>> winner;
        std::size_t winner_votes = 0;
        for (const auto& [pair, count] : votes)
            if (count > winner_votes) {
                winner = pair;
                winner_votes = count;
            }
        if (winner && winner_votes >= unassigned_votes) {
            bundle.assigned = true;
            const auto [lo, hi] = *winner;
            const auto forward = oriented.count({lo, hi}) ? oriented[{lo, hi}] : 0;
            const auto backward = oriented.count({hi, lo}) ? oriented[{hi, lo}] : 0;
            bundle.region_start = backward > forward ? hi : lo;
            bundle.region_end = backward > forward ? lo : hi;
            const auto ra = mesh.regions.find(bundle.region_start);
            const auto rb = mesh.regions.find(bundle.region_end);
            if (ra == mesh.regions.end() || rb == mesh.regions.end())
                throw DomainError("bundle references a region missing from the region table");
            bundle.color = average(ra->second.color, rb->second.color);
            result.assigned_streamlines += cluster.members.size();
        } else {
            bundle.color = Rgb{0.5, 0.5, 0.5};
            result.unassigned_streamlines += cluster.members.size();
        }

        bundle.start_vertex = cloud.nearest(bundle.start);
        bundle.end_vertex = cloud.nearest(bundle.end);
        if (!transfer.disk_uv.empty()) {
            bundle.start_uv = transfer.disk_uv[bundle.start_vertex];
            bundle.end_uv = transfer.disk_uv[bundle.end_vertex];
        }
        if (!transfer.sphere_xyz.empty()) {
            bundle.start_sphere = transfer.sphere_xyz[bundle.start_vertex];
            bundle.end_sphere = transfer.sphere_xyz[bundle.end_vertex];
        }
        result.bundles.push_back(std::move(bundle));
    }
    return result;
}

}  // namespace cortex
