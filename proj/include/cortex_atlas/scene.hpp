#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/json_writer.hpp"
#include "cortex_atlas/param_map.hpp"
#include "cortex_atlas/sphere_map.hpp"
#include "cortex_atlas/tract.hpp"

namespace cortex {

inline constexpr int kSceneVersion = 1;

/// Right-hemisphere region ids are shifted by this much once both
/// hemispheres share one index space (combined vertices: left, then right).
inline constexpr int kRightRegionOffset = 1000;

/// Concatenation of the given hemispheres, left first. Right labels, region
/// ids and channels are carried over with the region offset applied. Either
/// pointer may be null, not both.
TriMesh combine_hemispheres(const TriMesh* left, const TriMesh* right);

// ---------------------------------------------------------------------------
// Intermediate artifacts. These keep full precision; only the Scene is
// rounded to 9 significant digits.

struct SphereArtifact {
    SphereMap sphere;
    double rotation = 0.0;
    bool reflected = false;
    int offset = 0;
    double rms = 0.0;
    int samples = 0;
    std::vector<ExplodedScene> exploded;  // offsets only; positions are not stored
};

Json sphere_to_json(const SphereArtifact& artifact);
SphereArtifact sphere_from_json(const Json& doc);

Json clusters_to_json(const QuickBundlesResult& result);
QuickBundlesResult clusters_from_json(const Json& doc);

Json bundle_to_json(const Bundle& bundle, std::size_t id);
Json bundles_to_json(const CoalesceResult& result);
CoalesceResult bundles_from_json(const Json& doc);

Json graph_to_json(const ConnectivityGraph& graph);
ConnectivityGraph graph_from_json(const Json& doc);

Json overlay_to_json(const OverlayField& overlay);
OverlayField overlay_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);

/// Shortest round-trip JSON, newline terminated.
void write_artifact(const std::filesystem::path& path, const Json& doc);

// ---------------------------------------------------------------------------
// Scene

struct SceneHemisphere {
    TriMesh mesh;  // own indexing, raw region ids
    std::optional<DiskMap> disk;
};

struct SceneInputs {
    std::optional<SceneHemisphere> left;
    std::optional<SceneHemisphere> right;
    std::optional<SphereArtifact> sphere;
    std::vector<OverlayField> overlays;  // combined vertex indexing
    std::optional<CoalesceResult> bundles;
    std::optional<ConnectivityGraph> graph;
    Json provenance = Json::object();
};

Json build_scene(const SceneInputs& inputs);

/// Canonical text; the file exporter and the HTTP service both use this.
std::string format_scene(const Json& scene);

/// Structural and cross-reference problems, empty when the Scene is valid.
std::vector<std::string> validate_scene(const Json& scene);

// ---------------------------------------------------------------------------
// Service

struct SceneService {
    Json scene;
    std::string scene_body;
    std::vector<int> labels;  // combined, region offset applied
    std::optional<TimeSeriesField> series;
    std::filesystem::path web_root;
};

/// Throws DomainError when the Scene is invalid or the series does not have
/// one row per Scene vertex.
SceneService make_service(Json scene, std::optional<TimeSeriesField> series, bool regress_mean_gray,
                          const std::filesystem::path& web_root, Warnings* warnings = nullptr);

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Socket-free request handling, shared by the server and the tests.
HttpReply handle_request(const SceneService& service, const std::string& path,
                         const std::map<std::string, std::string>& query);

/// Default static asset directory compiled into the library.
std::filesystem::path default_web_root();

class SceneServer {
public:
    explicit SceneServer(const SceneService& service);
    ~SceneServer();
    SceneServer(const SceneServer&) = delete;
    SceneServer& operator=(const SceneServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cortex
