#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cortex_atlas/mesh.hpp"
#include "cortex_atlas/warnings.hpp"

namespace cortex {

using Polyline = std::vector<Vec3>;

/// Tractography polylines in the mesh coordinate frame (millimetres). Input
/// order is preserved; clustering depends on it.
struct StreamlineSet {
    std::vector<Polyline> streamlines;
    std::string space = "mesh";

    std::size_t size() const { return streamlines.size(); }
};

enum class StreamlineFormat { text, binary };

std::optional<StreamlineFormat> parse_streamline_format(std::string_view name);

/// Text: one `x y z` per line, streamlines separated by blank lines.
/// Binary: "TRKS", u32 count, then per streamline u32 n and n x 3 f32 (LE).
/// Consecutive duplicate points are collapsed; a record of identical points
/// is kept as a zero-length two-point polyline.
StreamlineSet parse_streamlines(std::string_view bytes, StreamlineFormat format);
StreamlineSet load_streamlines(const std::filesystem::path& path, StreamlineFormat format);
std::string format_streamlines(const StreamlineSet& set, StreamlineFormat format);
void save_streamlines(const StreamlineSet& set, const std::filesystem::path& path, StreamlineFormat format);

/// k points at equal arc-length spacing, endpoints preserved exactly. Throws
/// DomainError for k < 2 or a zero-length polyline.
Polyline resample(const Polyline& line, int k);

/// Minimum average direct-flip distance between two k-point polylines.
double mdf(const Polyline& a, const Polyline& b);

struct Cluster {
    int id = 0;
    std::vector<std::size_t> members;  // streamline indices in assignment order
    Polyline centroid;                 // running mean of flip-aligned members
    int k = 0;
};

struct QuickBundlesResult {
    std::vector<Cluster> clusters;
    std::vector<int> assignment;         // cluster id per streamline, -1 if skipped
    std::vector<double> admitted_at;     // MDF to the centroid when joined; NaN when it opened a cluster
    std::vector<std::size_t> skipped;    // streamlines that could not be resampled
    double theta = 0.0;
    int k = 0;
};

inline constexpr int kDefaultResample = 12;
inline constexpr double kDefaultTheta = 10.0;
inline constexpr double kDefaultMaxEndpointDistance = 4.0;

/// Single greedy pass in input order. Ties between equally close clusters go
/// to the lowest id.
QuickBundlesResult quickbundles(const StreamlineSet& set, double theta, int k = kDefaultResample,
                                Warnings* warnings = nullptr);

struct EndpointAssignment {
    std::optional<int> start;  // region label at the first point
    std::optional<int> end;    // region label at the last point
    int start_vertex = -1;
    int end_vertex = -1;
};

/// Nearest mesh vertex within d_max of each endpoint; equal distances (within
/// 1e-12) go to the smaller vertex index. Throws DomainError on an unlabeled
/// mesh.
std::vector<EndpointAssignment> assign_endpoints(const StreamlineSet& set, const TriMesh& mesh,
                                                 double d_max = kDefaultMaxEndpointDistance);

/// Per-vertex coordinates in the parameter domains, indexed like the mesh
/// used for coalescing. Either vector may be empty.
struct ParamTransfer {
    std::vector<Vec2> disk_uv;
    std::vector<Vec3> sphere_xyz;
};

struct Bundle {
    int cluster = -1;
    bool assigned = false;
    int region_start = -1;  // region at the start centroid (-1 unassigned)
    int region_end = -1;
    std::size_t member_count = 0;
    Vec3 start = Vec3::Zero();  // endpoint centroids in 3D
    Vec3 end = Vec3::Zero();
    int start_vertex = -1;  // nearest mesh vertex to each centroid
    int end_vertex = -1;
    std::optional<Vec2> start_uv, end_uv;
    std::optional<Vec3> start_sphere, end_sphere;
    double width = 0.0;  // sqrt(member_count)
    Rgb color;
    Polyline polyline;

    /// Canonical unordered pair (min, max); meaningful only when assigned.
    std::pair<int, int> region_pair() const {
        return {std::min(region_start, region_end), std::max(region_start, region_end)};
    }
};

struct CoalesceResult {
    std::vector<Bundle> bundles;
    std::size_t assigned_streamlines = 0;    // members of assigned bundles
    std::size_t unassigned_streamlines = 0;  // members of unassigned bundles
    std::size_t skipped_streamlines = 0;
};

/// Merges each cluster at its endpoints. The region pair is the majority of
/// member pairs (ties to the lexicographically smallest pair); a cluster
/// whose most common outcome is "unassigned" becomes an unassigned bundle.
CoalesceResult coalesce(const QuickBundlesResult& clusters, const StreamlineSet& set,
                        const std::vector<EndpointAssignment>& assignments, const TriMesh& mesh,
                        const ParamTransfer& transfer = {});

namespace synth {

struct StreamlineOptions {
    std::size_t count = 1000;
    std::size_t bundles = 40;
    double jitter_mm = 1.2;
    double stray_fraction = 0.03;       // endpoints deep inside, never assigned
    double degenerate_fraction = 0.002; // zero-length records
    std::uint64_t seed = 7;
};

/// Bundles of noisy curves between random vertex pairs of `mesh`.
StreamlineSet streamlines(const TriMesh& mesh, const StreamlineOptions& options = {});

}  // namespace synth

}  // namespace cortex
