#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cortex {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

enum class Hemisphere { left, right, other };

std::string_view hemisphere_name(Hemisphere h);
Hemisphere parse_hemisphere(std::string_view name);

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

struct Region {
    std::string name;
    Rgb color;
    double area_mm2 = 0.0;  // derived from vertex areas of member vertices
    Hemisphere hemisphere = Hemisphere::other;
};

using RegionTable = std::map<int, Region>;

/// Triangle mesh of one cortical hemisphere. Labels are per vertex; an empty
/// label vector means the mesh is unlabeled. Built through make_mesh or the
/// loaders, which validate and orient it.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<int> labels;
    RegionTable regions;
    std::map<std::string, std::vector<double>> channels;
    Hemisphere hemisphere = Hemisphere::other;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool labeled() const { return !labels.empty(); }
};

/// Validates indices, degeneracy, edge-manifoldness and triangle areas, then
/// makes the winding consistent by flood fill from face 0 of each connected
/// component. Throws ParseError / TopologyError.
TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                  Hemisphere hemisphere = Hemisphere::other);

/// Re-runs the structural checks of make_mesh on an existing mesh.
void validate_mesh(const TriMesh& mesh);

/// Number of faces flipped to agree with their component's seed face.
std::size_t repair_orientation(std::vector<Face>& faces);

/// Hex digest of the geometry (vertices and faces), used as a mesh id.
std::string mesh_digest(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// I/O

enum class MeshFormat { off, vtk, json };

MeshFormat mesh_format_from_path(const std::filesystem::path& path);
std::optional<MeshFormat> parse_mesh_format(std::string_view name);

TriMesh parse_mesh(std::string_view text, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

/// JSON output round-trips vertices bit-exactly (shortest round-trip reals).
std::string format_mesh(const TriMesh& mesh, MeshFormat format);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format);

// ---------------------------------------------------------------------------
// Labels and regions

/// Rows are `vertex_id,label_id[,label_name,r,g,b]`. A row whose vertex id is
/// `*` declares the default label for vertices without a row. Lines starting
/// with '#' and a leading `vertex_id,...` header are ignored.
TriMesh attach_labels_csv(const TriMesh& mesh, std::string_view csv);
TriMesh attach_labels(const TriMesh& mesh, const std::filesystem::path& csv);

/// Deterministic display color for a label without one (golden-ratio hue).
Rgb default_region_color(int label_id);

/// Majority label of a face's corners, ties to the smallest id.
int face_region(const TriMesh& mesh, std::size_t face);

/// Recomputes Region::area_mm2 from vertex areas and drops table entries no
/// vertex uses any more.
void refresh_regions(TriMesh& mesh);

struct RegionRemoval {
    TriMesh mesh;
    std::vector<int> old_to_new;  // -1 for dropped vertices
    std::vector<int> new_to_old;
};

/// Drops every face whose three corners carry `label_id`, then isolated
/// vertices. The result must be connected with disk topology; an unused
/// label returns the mesh unchanged.
RegionRemoval remove_region(const TriMesh& mesh, int label_id);

// ---------------------------------------------------------------------------
// Topology

/// Boundary loops ordered so the surface lies to the left (face winding
/// direction), each starting at its smallest vertex index, sorted by
/// descending length. Closed meshes give an empty list.
std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh);

struct TopologyReport {
    std::size_t vertices = 0;  // vertices referenced by at least one face
    std::size_t edges = 0;
    std::size_t faces = 0;
    long euler_characteristic = 0;
    std::size_t boundary_loops = 0;
    std::size_t components = 0;
    std::size_t isolated_vertices = 0;
};

TopologyReport topology_report(const TriMesh& mesh);

/// Throws TopologyError unless the mesh is one component with chi = 1 and a
/// single boundary loop.
void validate_disk_topology(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// Geometry

inline constexpr double kCotangentClamp = 1e6;

struct EdgeWeights {
    std::vector<std::pair<int, int>> edges;  // i < j, sorted
    std::vector<double> weights;
    std::vector<bool> boundary;

    /// Weight of edge {i, j}; nullopt when the edge does not exist.
    std::optional<double> weight(int i, int j) const;
};

/// w_ij = (cot a + cot b) / 2 over the angles opposite the edge, one term on
/// boundary edges. Cotangents are clamped to +-kCotangentClamp.
EdgeWeights cotangent_weights(const TriMesh& mesh);

std::vector<double> face_areas(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);

/// One third of the incident triangle areas per vertex.
std::vector<double> vertex_areas(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// Synthetic fixtures for tests, examples and the acceptance suite.

namespace synth {

TriMesh single_triangle();
TriMesh unit_square();
TriMesh equilateral_triangle();
TriMesh right_isoceles_triangle();

/// Subdivided icosahedron on the unit sphere (closed, genus 0).
TriMesh icosphere(int subdivisions);

/// Flat disk in the z = 0 plane with `rings` concentric rings; the outer ring
/// is a regular polygon on the unit circle starting at angle 0, so its
/// smallest index sits at (1, 0) and the loop runs counter-clockwise.
TriMesh flat_disk(int rings);

/// Unit hemisphere z <= 0 built from latitude rings (pole at vertex 0,
/// boundary on the equator). About 5 * rings^2 faces.
TriMesh hemisphere(int rings);

/// Flat annulus between radii 0.5 and 1.
TriMesh annulus(int segments);

/// Closed latitude-ring sphere of radius `radius`.
TriMesh ring_sphere(int rings, double radius);

struct CortexOptions {
    int rings = 70;            // latitude resolution of the closed surface
    double radius_mm = 50.0;
    double fold_amplitude = 0.03;
    int sectors = 6;           // longitude sectors per band
    int bands = 2;             // latitude bands above the medial wall
    double x_offset_mm = 55.0; // hemispheres sit at -x / +x
};

/// Closed, mildly folded hemisphere-like surface. Label 0 is the medial wall
/// (a cap facing the midline), labels 1..sectors*bands are gyral patches. A
/// smooth "myelin" channel is attached. The right hemisphere mirrors the
/// left through x = 0.
TriMesh cortex_hemisphere(Hemisphere side, const CortexOptions& options = {});

}  // namespace synth

}  // namespace cortex
