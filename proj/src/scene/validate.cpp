#include <cmath>
#include <set>

#include "cortex_atlas/scene.hpp"

namespace cortex {

namespace {

struct Checker {
    std::vector<std::string> problems;

    bool require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
        return ok;
    }

    bool field(const Json& obj, const char* key, const std::string& where) {
        return require(obj.is_object() && obj.contains(key), where + ": missing '" + key + "'");
    }
};

bool is_vector(const Json& j, std::size_t n) {
    if (!j.is_array() || j.size() != n) return false;
    for (const auto& x : j)
        if (!x.is_number()) return false;
    return true;
}

bool is_index(const Json& j, std::size_t bound) {
    return j.is_number_integer() && j.get<long long>() >= 0 && static_cast<std::size_t>(j.get<long long>()) < bound;
}

std::vector<std::string> check_scene(const Json& scene) {
    Checker c;
    if (!c.require(scene.is_object(), "Scene must be an object")) return c.problems;
    for (const char* key : {"version", "vertex_count", "meshes", "disk_maps", "sphere", "overlays", "bundles", "graph",
                            "provenance"})
        c.field(scene, key, "scene");
    if (!c.problems.empty()) return c.problems;
    c.require(scene["version"].is_number_integer() && scene["version"].get<int>() == kSceneVersion,
              "unsupported Scene version");
    c.require(scene["provenance"].is_object(), "provenance must be an object");

    // Meshes and the region id space they define.
    std::set<int> regions;
    std::map<std::string, std::size_t> mesh_vertices;
    std::size_t total = 0;
    const auto& meshes = scene["meshes"];
    if (!c.require(meshes.is_object() && !meshes.empty(), "meshes must be a non-empty object")) return c.problems;
    for (const auto& [key, m] : meshes.items()) {
        const std::string where = "meshes." + key;
        if (!c.require(key == "left" || key == "right", where + ": key must be left or right")) continue;
        bool ok = true;
        for (const char* f : {"vertices", "faces", "labels", "regions", "vertex_offset", "hemisphere"})
            ok = c.field(m, f, where) && ok;
        if (!ok) continue;
        const std::size_t nv = m["vertices"].size();
        c.require(m["vertex_offset"].is_number_integer() && m["vertex_offset"].get<std::size_t>() == total,
                  where + ": vertex_offset does not follow left-then-right order");
        mesh_vertices[key] = nv;
        total += nv;
        for (const auto& v : m["vertices"])
            if (!c.require(is_vector(v, 3), where + ": vertex must be 3 numbers")) break;
        for (const auto& f : m["faces"]) {
            const bool good = f.is_array() && f.size() == 3 && is_index(f[0], nv) && is_index(f[1], nv) &&
                              is_index(f[2], nv);
            if (!c.require(good, where + ": face index out of range")) break;
        }
        std::set<int> local;
        for (const auto& r : m["regions"]) {
            if (!c.require(r.contains("id") && r["id"].is_number_integer() && r.contains("name") &&
                               r.contains("color") && is_vector(r["color"], 3),
                           where + ": malformed region"))
                continue;
            const int id = r["id"].get<int>();
            c.require(regions.insert(id).second, where + ": duplicate region id " + std::to_string(id));
            local.insert(id);
        }
        const auto& labels = m["labels"];
        c.require(labels.empty() || labels.size() == nv, where + ": labels length differs from vertex count");
        for (const auto& l : labels)
            if (!c.require(l.is_number_integer() && local.count(l.get<int>()), where + ": label without a region"))
                break;
    }
    c.require(scene["vertex_count"].is_number_integer() && scene["vertex_count"].get<std::size_t>() == total,
              "vertex_count differs from the meshes");

    for (const auto& [key, d] : scene["disk_maps"].items()) {
        const std::string where = "disk_maps." + key;
        if (!c.require(mesh_vertices.count(key), where + ": no mesh for this disk map")) continue;
        if (!c.field(d, "uv", where) || !c.field(d, "boundary", where)) continue;
        c.require(d["uv"].size() == mesh_vertices[key], where + ": uv length differs from the mesh");
        for (const auto& p : d["uv"])
            if (!c.require(is_vector(p, 2), where + ": uv must be 2 numbers")) break;
        for (const auto& b : d["boundary"])
            if (!c.require(is_index(b, mesh_vertices[key]), where + ": boundary index out of range")) break;
    }

    if (const auto& s = scene["sphere"]; !s.is_null()) {
        if (c.field(s, "positions", "sphere") && c.field(s, "exploded", "sphere")) {
            c.require(s["positions"].size() == total, "sphere: positions differ from vertex count");
            for (const auto& e : s["exploded"]) {
                c.require(e.contains("scale") && e["scale"].is_number() && e["scale"].get<double>() >= 1.0,
                          "sphere.exploded: scale must be >= 1");
                for (const auto& o : e.value("offsets", Json::array()))
                    c.require(o.contains("region") && regions.count(o["region"].get<int>()) && is_vector(o["offset"], 3),
                              "sphere.exploded: offset for an unknown region");
            }
        }
    }

    for (const auto& o : scene["overlays"]) {
        if (!c.field(o, "name", "overlay") || !c.field(o, "values", "overlay") || !c.field(o, "range", "overlay") ||
            !c.field(o, "colormap", "overlay"))
            continue;
        const std::string where = "overlay " + o["name"].get<std::string>();
        c.require(o["values"].size() == total, where + ": length differs from vertex count");
        if (!c.require(is_vector(o["range"], 2), where + ": range must be 2 numbers")) continue;
        const double lo = o["range"][0].get<double>(), hi = o["range"][1].get<double>();
        c.require(lo <= hi, where + ": empty range");
        for (const auto& v : o["values"])
            if (!c.require(v.is_number() && v.get<double>() >= lo && v.get<double>() <= hi,
                           where + ": value outside the declared range"))
                break;
        const auto cmap = o["colormap"].get<std::string>();
        c.require(cmap == "grayscale" || cmap == "diverging" || cmap == "categorical", where + ": unknown colormap");
    }

    for (const auto& b : scene["bundles"]) {
        bool ok = true;
        for (const char* f : {"id", "assigned", "region_start", "region_end", "member_count", "width", "color", "polyline"})
            ok = c.field(b, f, "bundle") && ok;
        if (!ok) continue;
        const std::string where = "bundle " + b["id"].dump();
        if (b["assigned"].get<bool>())
            c.require(regions.count(b["region_start"].get<int>()) && regions.count(b["region_end"].get<int>()),
                      where + ": references an unknown region");
        c.require(b["polyline"].size() >= 2, where + ": polyline needs two points");
        c.require(b["member_count"].get<long long>() >= 1, where + ": no members");
    }

    if (const auto& g = scene["graph"]; !g.is_null()) {
        if (c.field(g, "nodes", "graph") && c.field(g, "edges", "graph")) {
            std::set<int> nodes;
            for (const auto& n : g["nodes"]) {
                const int id = n.at("id").get<int>();
                nodes.insert(id);
                c.require(regions.count(id), "graph: node " + std::to_string(id) + " is not a mesh region");
                const double ra = n.at("relative_area").get<double>();
                c.require(ra > 0.0 && ra <= 1.0, "graph: relative_area outside (0, 1]");
            }
            for (const auto& e : g["edges"]) {
                c.require(nodes.count(e.at("region_a").get<int>()) && nodes.count(e.at("region_b").get<int>()),
                          "graph: edge endpoint is not a node");
                const auto bundles = e.at("bundle_count").get<long long>();
                c.require(bundles >= 1 && e.at("streamline_count").get<long long>() >= bundles,
                          "graph: edge counts violate streamline_count >= bundle_count >= 1");
            }
        }
    }
    return c.problems;
}

}  // namespace

std::vector<std::string> validate_scene(const Json& scene) {
    try {
        return check_scene(scene);
    } catch (const Json::exception& e) {
        return {std::string("malformed Scene: ") + e.what()};
    }
}

}  // namespace cortex
