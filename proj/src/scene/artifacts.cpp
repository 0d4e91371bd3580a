#include <cmath>
#include <limits>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/scene.hpp"

namespace cortex {

namespace {

Json vec(const Vec3& p) { return Json::array({p.x(), p.y(), p.z()}); }
Json vec(const Vec2& p) { return Json::array({p.x(), p.y()}); }
Json rgb(const Rgb& c) { return Json::array({c.r, c.g, c.b}); }

Vec3 vec3(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 vec2(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("expected a 2-vector");
    return {j[0].get<double>(), j[1].get<double>()};
}

Rgb color(const Json& j) {
    const Vec3 c = vec3(j);
    return {c.x(), c.y(), c.z()};
}

Json points(const std::vector<Vec3>& ps) {
    Json out = Json::array();
    for (const auto& p : ps) out.push_back(vec(p));
    return out;
}

std::vector<Vec3> points_from(const Json& j) {
    std::vector<Vec3> out;
    out.reserve(j.size());
    for (const auto& p : j) out.push_back(vec3(p));
    return out;
}

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ParseError(std::string(what) + " JSON: " + e.what());
    }
}

}  // namespace

TriMesh combine_hemispheres(const TriMesh* left, const TriMesh* right) {
    if (!left && !right) throw DomainError("no hemisphere to combine");
    TriMesh out;
    out.hemisphere = left && right ? Hemisphere::other : (left ? left->hemisphere : right->hemisphere);
    const bool labeled = (!left || left->labeled()) && (!right || right->labeled());
    std::vector<const TriMesh*> parts;
    for (const auto& [part, shift] : {std::pair{left, 0}, std::pair{right, kRightRegionOffset}}) {
        if (!part) continue;
        parts.push_back(part);
        const int base = static_cast<int>(out.vertices.size());
        out.vertices.insert(out.vertices.end(), part->vertices.begin(), part->vertices.end());
        for (const auto& f : part->faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
        if (labeled) {
            for (int l : part->labels) out.labels.push_back(l + shift);
            for (const auto& [id, r] : part->regions) out.regions[id + shift] = r;
        }
    }
    // Only channels every part carries stay per-vertex fields.
    for (const auto& [name, values] : parts.front()->channels) {
        std::vector<double> joined;
        bool everywhere = true;
        for (const TriMesh* part : parts) {
            const auto it = part->channels.find(name);
            if (it == part->channels.end()) {
                everywhere = false;
                break;
            }
            joined.insert(joined.end(), it->second.begin(), it->second.end());
        }
        if (everywhere) out.channels[name] = std::move(joined);
    }
    return out;
}

Json sphere_to_json(const SphereArtifact& a) {
    Json doc;
    doc["version"] = 1;
    doc["radius"] = a.sphere.radius;
    doc["positions"] = points(a.sphere.xyz);
    Json side = Json::array();
    for (Cap c : a.sphere.side) side.push_back(c == Cap::lower ? 0 : 1);
    doc["side"] = side;
    doc["lower_boundary"] = a.sphere.lower_boundary;
    doc["upper_boundary"] = a.sphere.upper_boundary;
    doc["lower_count"] = a.sphere.lower_count;
    Json seam = Json::array();
    for (const auto& [v, p] : a.sphere.seam) seam.push_back({{"vertex", v}, {"point", vec(p)}});
    doc["seam"] = seam;
    doc["rotation"] = a.rotation;
    doc["reflected"] = a.reflected;
    doc["offset"] = a.offset;
    doc["rms"] = a.rms;
    doc["samples"] = a.samples;
    Json exploded = Json::array();
    for (const auto& e : a.exploded) {
        Json offsets = Json::array();
        for (const auto& [region, off] : e.offsets) offsets.push_back({{"region", region}, {"offset", vec(off)}});
        exploded.push_back({{"scale", e.scale}, {"radius", e.radius}, {"offsets", offsets}});
    }
    doc["exploded"] = exploded;
    return doc;
}

SphereArtifact sphere_from_json(const Json& doc) {
    return guarded("sphere", [&] {
        SphereArtifact a;
        a.sphere.radius = doc.at("radius").get<double>();
        a.sphere.xyz = points_from(doc.at("positions"));
        for (const auto& s : doc.at("side")) a.sphere.side.push_back(s.get<int>() == 0 ? Cap::lower : Cap::upper);
        a.sphere.lower_boundary = doc.at("lower_boundary").get<std::vector<int>>();
        a.sphere.upper_boundary = doc.at("upper_boundary").get<std::vector<int>>();
        a.sphere.lower_count = doc.at("lower_count").get<std::size_t>();
        for (const auto& s : doc.at("seam")) a.sphere.seam.emplace_back(s.at("vertex").get<int>(), vec3(s.at("point")));
        a.rotation = doc.at("rotation").get<double>();
        a.reflected = doc.at("reflected").get<bool>();
        a.offset = doc.at("offset").get<int>();
        a.rms = doc.at("rms").get<double>();
        a.samples = doc.at("samples").get<int>();
        for (const auto& e : doc.at("exploded")) {
            ExplodedScene s;
            s.scale = e.at("scale").get<double>();
            s.radius = e.at("radius").get<double>();
            for (const auto& o : e.at("offsets")) s.offsets[o.at("region").get<int>()] = vec3(o.at("offset"));
            a.exploded.push_back(std::move(s));
        }
        if (a.sphere.side.size() != a.sphere.xyz.size()) throw ParseError("sphere side/positions length mismatch");
        return a;
    });
}

Json clusters_to_json(const QuickBundlesResult& r) {
    Json doc;
    doc["version"] = 1;
    doc["theta"] = r.theta;
    doc["k"] = r.k;
    doc["assignment"] = r.assignment;
    Json admitted = Json::array();
    for (double d : r.admitted_at) admitted.push_back(std::isnan(d) ? Json(nullptr) : Json(d));
    doc["admitted_at"] = admitted;
    doc["skipped"] = r.skipped;
    Json clusters = Json::array();
    for (const auto& c : r.clusters)
        clusters.push_back({{"id", c.id}, {"k", c.k}, {"members", c.members}, {"centroid", points(c.centroid)}});
    doc["clusters"] = clusters;
    return doc;
}

QuickBundlesResult clusters_from_json(const Json& doc) {
    return guarded("clusters", [&] {
        QuickBundlesResult r;
        r.theta = doc.at("theta").get<double>();
        r.k = doc.at("k").get<int>();
        r.assignment = doc.at("assignment").get<std::vector<int>>();
        for (const auto& d : doc.at("admitted_at"))
            r.admitted_at.push_back(d.is_null() ? std::numeric_limits<double>::quiet_NaN() : d.get<double>());
        r.skipped = doc.at("skipped").get<std::vector<std::size_t>>();
        for (const auto& c : doc.at("clusters")) {
            Cluster cl;
            cl.id = c.at("id").get<int>();
            cl.k = c.at("k").get<int>();
            cl.members = c.at("members").get<std::vector<std::size_t>>();
            cl.centroid = points_from(c.at("centroid"));
            r.clusters.push_back(std::move(cl));
        }
        for (std::size_t i = 0; i < r.clusters.size(); ++i)
            if (r.clusters[i].id != static_cast<int>(i)) throw ParseError("cluster ids must be 0..n-1 in order");
        for (int a : r.assignment)
            if (a < -1 || a >= static_cast<int>(r.clusters.size())) throw ParseError("cluster assignment out of range");
        return r;
    });
}

Json bundle_to_json(const Bundle& b, std::size_t id) {
    Json j;
    j["id"] = id;
    j["cluster"] = b.cluster;
    j["assigned"] = b.assigned;
    j["region_start"] = b.region_start;
    j["region_end"] = b.region_end;
    j["member_count"] = b.member_count;
    j["start"] = vec(b.start);
    j["end"] = vec(b.end);
    j["start_vertex"] = b.start_vertex;
    j["end_vertex"] = b.end_vertex;
    if (b.start_uv) j["start_uv"] = vec(*b.start_uv);
    if (b.end_uv) j["end_uv"] = vec(*b.end_uv);
    if (b.start_sphere) j["start_sphere"] = vec(*b.start_sphere);
    if (b.end_sphere) j["end_sphere"] = vec(*b.end_sphere);
    j["width"] = b.width;
    j["color"] = rgb(b.color);
    j["polyline"] = points(b.polyline);
    return j;
}

Json bundles_to_json(const CoalesceResult& r) {
    Json doc;
    doc["version"] = 1;
    doc["assigned_streamlines"] = r.assigned_streamlines;
    doc["unassigned_streamlines"] = r.unassigned_streamlines;
    doc["skipped_streamlines"] = r.skipped_streamlines;
    Json bundles = Json::array();
    for (std::size_t i = 0; i < r.bundles.size(); ++i) bundles.push_back(bundle_to_json(r.bundles[i], i));
    doc["bundles"] = bundles;
    return doc;
}

CoalesceResult bundles_from_json(const Json& doc) {
    return guarded("bundles", [&] {
        CoalesceResult r;
        r.assigned_streamlines = doc.at("assigned_streamlines").get<std::size_t>();
        r.unassigned_streamlines = doc.at("unassigned_streamlines").get<std::size_t>();
        r.skipped_streamlines = doc.at("skipped_streamlines").get<std::size_t>();
        for (const auto& j : doc.at("bundles")) {
            Bundle b;
            b.cluster = j.at("cluster").get<int>();
            b.assigned = j.at("assigned").get<bool>();
            b.region_start = j.at("region_start").get<int>();
            b.region_end = j.at("region_end").get<int>();
            b.member_count = j.at("member_count").get<std::size_t>();
            b.start = vec3(j.at("start"));
            b.end = vec3(j.at("end"));
            b.start_vertex = j.at("start_vertex").get<int>();
            b.end_vertex = j.at("end_vertex").get<int>();
            if (j.contains("start_uv")) b.start_uv = vec2(j["start_uv"]);
            if (j.contains("end_uv")) b.end_uv = vec2(j["end_uv"]);
            if (j.contains("start_sphere")) b.start_sphere = vec3(j["start_sphere"]);
            if (j.contains("end_sphere")) b.end_sphere = vec3(j["end_sphere"]);
            b.width = j.at("width").get<double>();
            b.color = color(j.at("color"));
            b.polyline = points_from(j.at("polyline"));
            r.bundles.push_back(std::move(b));
        }
        return r;
    });
}

Json graph_to_json(const ConnectivityGraph& g) {
    Json doc;
    Json nodes = Json::array();
    for (const auto& [id, n] : g.nodes) {
        nodes.push_back({{"id", id},
                         {"name", n.name},
                         {"hemisphere", std::string(hemisphere_name(n.hemisphere))},
                         {"area_mm2", n.area_mm2},
                         {"relative_area", n.relative_area},
                         {"color", rgb(n.color)}});
    }
    Json edges = Json::array();
    for (const auto& [pair, e] : g.edges) {
        edges.push_back({{"region_a", pair.first},
                         {"region_b", pair.second},
                         {"bundle_count", e.bundle_count},
                         {"streamline_count", e.streamline_count}});
    }
    doc["nodes"] = nodes;
    doc["edges"] = edges;
    doc["unassigned_bundles"] = g.unassigned_bundles;
    doc["unassigned_streamlines"] = g.unassigned_streamlines;
    return doc;
}

ConnectivityGraph graph_from_json(const Json& doc) {
    return guarded("graph", [&] {
        ConnectivityGraph g;
        for (const auto& n : doc.at("nodes")) {
            GraphNode node;
            node.name = n.at("name").get<std::string>();
            node.hemisphere = parse_hemisphere(n.at("hemisphere").get<std::string>());
            node.area_mm2 = n.at("area_mm2").get<double>();
            node.relative_area = n.at("relative_area").get<double>();
            node.color = color(n.at("color"));
            g.nodes[n.at("id").get<int>()] = node;
        }
        for (const auto& e : doc.at("edges")) {
            const int a = e.at("region_a").get<int>();
            const int b = e.at("region_b").get<int>();
            g.edges[{std::min(a, b), std::max(a, b)}] = {e.at("bundle_count").get<std::size_t>(),
                                                         e.at("streamline_count").get<std::size_t>()};
        }
        g.unassigned_bundles = doc.at("unassigned_bundles").get<std::size_t>();
        g.unassigned_streamlines = doc.at("unassigned_streamlines").get<std::size_t>();
        return g;
    });
}

Json overlay_to_json(const OverlayField& o) {
    return {{"name", o.name},
            {"values", o.values},
            {"range", Json::array({o.range_min, o.range_max})},
            {"colormap", std::string(colormap_name(o.colormap))},
            {"flagged", o.flagged}};
}

OverlayField overlay_from_json(const Json& doc) {
    return guarded("overlay", [&] {
        OverlayField o;
        o.name = doc.at("name").get<std::string>();
        o.values = doc.at("values").get<std::vector<double>>();
        const auto& range = doc.at("range");
        o.range_min = range.at(0).get<double>();
        o.range_max = range.at(1).get<double>();
        const auto cmap = doc.at("colormap").get<std::string>();
        if (cmap == "grayscale") o.colormap = Colormap::grayscale;
        else if (cmap == "diverging") o.colormap = Colormap::diverging;
        else if (cmap == "categorical") o.colormap = Colormap::categorical;
        else throw ParseError("unknown colormap '" + cmap + "'");
        o.flagged = doc.value("flagged", std::vector<int>{});
        return o;
    });
}

Json read_json_file(const std::filesystem::path& path) {
    const auto text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_artifact(const std::filesystem::path& path, const Json& doc) { write_file(path, doc.dump() + "\n"); }

}  // namespace cortex
