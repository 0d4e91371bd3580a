#include "cortex_atlas/error.hpp"
#include "cortex_atlas/scene.hpp"

namespace cortex {

namespace {

Json mesh_block(const TriMesh& mesh, std::size_t vertex_offset, int region_offset) {
    Json j;
    j["hemisphere"] = std::string(hemisphere_name(mesh.hemisphere));
    j["vertex_offset"] = vertex_offset;
    j["region_offset"] = region_offset;
    Json vertices = Json::array();
    for (const auto& v : mesh.vertices) vertices.push_back({v.x(), v.y(), v.z()});
    j["vertices"] = vertices;
    Json faces = Json::array();
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    j["faces"] = faces;
    std::vector<int> labels;
    labels.reserve(mesh.labels.size());
    for (int l : mesh.labels) labels.push_back(l + region_offset);
    j["labels"] = labels;
    Json regions = Json::array();
    for (const auto& [id, r] : mesh.regions) {
        regions.push_back({{"id", id + region_offset},
                           {"name", r.name},
                           {"color", {r.color.r, r.color.g, r.color.b}},
                           {"area_mm2", r.area_mm2},
                           {"hemisphere", std::string(hemisphere_name(r.hemisphere))}});
    }
    j["regions"] = regions;
    return j;
}

Json disk_block(const DiskMap& disk, const TriMesh& mesh) {
    if (disk.uv.size() != mesh.vertex_count())
        throw DomainError("disk map has " + std::to_string(disk.uv.size()) + " vertices, mesh has " +
                          std::to_string(mesh.vertex_count()));
    Json uv = Json::array();
    for (const auto& p : disk.uv) uv.push_back({p.x(), p.y()});
    return {{"uv", uv}, {"boundary", disk.boundary}};
}

Json sphere_block(const SphereArtifact& a) {
    Json positions = Json::array();
    for (const auto& p : a.sphere.xyz) positions.push_back({p.x(), p.y(), p.z()});
    Json exploded = Json::array();
    for (const auto& e : a.exploded) {
        Json offsets = Json::array();
        for (const auto& [region, o] : e.offsets) offsets.push_back({{"region", region}, {"offset", {o.x(), o.y(), o.z()}}});
        exploded.push_back({{"scale", e.scale}, {"offsets", offsets}});
    }
    return {{"radius", a.sphere.radius},
            {"positions", positions},
            {"lower_count", a.sphere.lower_count},
            {"rotation", a.rotation},
            {"reflected", a.reflected},
            {"seam_rms", a.rms},
            {"exploded", exploded}};
}

}  // namespace

Json build_scene(const SceneInputs& in) {
    if (!in.left && !in.right) throw DomainError("a Scene needs at least one hemisphere mesh");
    Json scene;
    scene["version"] = kSceneVersion;

    Json meshes = Json::object();
    Json disks = Json::object();
    std::size_t offset = 0;
    for (const auto& [key, part, shift] : {std::tuple{"left", &in.left, 0}, std::tuple{"right", &in.right, kRightRegionOffset}}) {
        if (!*part) continue;
        const auto& h = **part;
        meshes[key] = mesh_block(h.mesh, offset, shift);
        if (h.disk) disks[key] = disk_block(*h.disk, h.mesh);
        offset += h.mesh.vertex_count();
    }
    scene["vertex_count"] = offset;
    scene["meshes"] = meshes;
    scene["disk_maps"] = disks;
    scene["sphere"] = in.sphere ? sphere_block(*in.sphere) : Json(nullptr);

    Json overlays = Json::array();
    for (const auto& o : in.overlays) overlays.push_back(overlay_to_json(o));
    scene["overlays"] = overlays;

    Json bundles = Json::array();
    if (in.bundles)
        for (std::size_t i = 0; i < in.bundles->bundles.size(); ++i)
            bundles.push_back(bundle_to_json(in.bundles->bundles[i], i));
    scene["bundles"] = bundles;
    scene["graph"] = in.graph ? graph_to_json(*in.graph) : Json(nullptr);
    scene["provenance"] = in.provenance;

    const auto problems = validate_scene(scene);
    if (!problems.empty()) throw DomainError("Scene is inconsistent: " + problems.front());
    return scene;
}

std::string format_scene(const Json& scene) { return to_canonical_json(scene); }

}  // namespace cortex
