#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cortex_atlas/mesh.hpp"
#include "cortex_atlas/tract.hpp"
#include "cortex_atlas/warnings.hpp"

namespace cortex {

// ---------------------------------------------------------------------------
// Connectivity graph

struct GraphNode {
    std::string name;
    Hemisphere hemisphere = Hemisphere::other;
    double area_mm2 = 0.0;
    double relative_area = 0.0;  // area / total area of the node's hemisphere
    Rgb color;
};

struct GraphEdge {
    std::size_t bundle_count = 0;
    std::size_t streamline_count = 0;
};

struct ConnectivityGraph {
    std::map<int, GraphNode> nodes;
    std::map<std::pair<int, int>, GraphEdge> edges;  // keyed by (min, max)
    std::size_t unassigned_bundles = 0;
    std::size_t unassigned_streamlines = 0;

    /// Symmetric lookup; nullptr when the pair has no bundles.
    const GraphEdge* edge(int a, int b) const;
    std::size_t streamline_total() const;
};

/// Nodes are every region of the table; edges aggregate assigned bundles by
/// unordered region pair. Throws DomainError when a bundle names a region
/// missing from the table.
ConnectivityGraph build_graph(const std::vector<Bundle>& bundles, const RegionTable& regions);

/// `region_a,region_b,bundle_count,streamline_count` with a header row.
std::string format_graph_csv(const ConnectivityGraph& graph);

// ---------------------------------------------------------------------------
// Functional data

/// Per-vertex time series, row-major V x T.
struct TimeSeriesField {
    std::size_t vertices = 0;
    std::size_t samples = 0;
    std::vector<double> values;

    const double* series(std::size_t v) const { return values.data() + v * samples; }
    double* series(std::size_t v) { return values.data() + v * samples; }
};

TimeSeriesField make_time_series(std::size_t vertices, std::size_t samples, std::vector<double> values);

/// TSF1: "TSF1", u32 V, u32 T, V x T little-endian f32, row-major.
TimeSeriesField parse_tsf(std::string_view bytes);
TimeSeriesField load_tsf(const std::filesystem::path& path);
std::string format_tsf(const TimeSeriesField& field);
void save_tsf(const TimeSeriesField& field, const std::filesystem::path& path);

enum class Colormap { grayscale, diverging, categorical };

std::string_view colormap_name(Colormap c);

struct OverlayField {
    std::string name;
    std::vector<double> values;
    double range_min = 0.0;
    double range_max = 0.0;
    Colormap colormap = Colormap::grayscale;
    std::vector<int> flagged;  // vertices whose value is a decided degenerate case
};

struct Seed {
    enum class Kind { vertex, region };
    Kind kind = Kind::region;
    int id = 0;

    static Seed vertex(int v) { return {Kind::vertex, v}; }
    static Seed region(int r) { return {Kind::region, r}; }
};

/// Pearson correlation of every vertex series with the seed series (the
/// single vertex, or the mean over the region's vertices). Zero-variance
/// series give 0 and are listed in `flagged`. Range [-1, 1], diverging.
OverlayField seed_correlation(const TimeSeriesField& ts, const Seed& seed, const std::vector<int>& labels = {});

/// Least-squares residual of every vertex series after regressing out the
/// constant and the global mean series g. If g is flat only the per-vertex
/// mean is removed and a warning is emitted.
TimeSeriesField regress_mean_gray(const TimeSeriesField& ts, Warnings* warnings = nullptr);

/// Registers a scalar channel as an overlay (grayscale, range auto-derived).
OverlayField attach_overlay(const TriMesh& mesh, const std::string& channel);

/// Validates a computed field against the mesh and derives a missing range.
OverlayField attach_overlay(const TriMesh& mesh, OverlayField field);

}  // namespace cortex

namespace cortex::synth {

struct TimeSeriesOptions {
    std::size_t samples = 120;
    double global_amplitude = 0.6;  // shared "mean gray" component
    double region_amplitude = 1.0;
    double noise = 0.4;
    std::uint64_t seed = 11;
};

/// Slow per-region oscillations plus a global component and white noise, one
/// row per entry of `labels`.
TimeSeriesField time_series(const std::vector<int>& labels, const TimeSeriesOptions& options = {});

}  // namespace cortex::synth
