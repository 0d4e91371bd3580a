#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/mesh.hpp"

namespace cortex {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

Rgb hsv_to_rgb(double h, double s, double v) {
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const double m = v - c;
    return {r + m, g + m, b + m};
}

}  // namespace

Rgb default_region_color(int label_id) {
    constexpr double kGolden = 0.6180339887498949;
    double hue = std::fmod(static_cast<double>(label_id) * kGolden, 1.0);
    if (hue < 0) hue += 1.0;
    return hsv_to_rgb(hue, 0.65, 0.9);
}

TriMesh attach_labels_csv(const TriMesh& mesh, std::string_view csv) {
    const std::size_t nv = mesh.vertex_count();
    std::vector<int> labels(nv, 0);
    std::vector<char> covered(nv, 0);
    std::optional<int> default_label;
    std::map<int, Region> declared;

    std::istringstream in{std::string(csv)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (line_no == 1 && fields[0] == "vertex_id") continue;
        const std::string where = "label CSV line " + std::to_string(line_no);
        if (fields.size() != 2 && fields.size() != 6)
            throw ParseError(where + ": expected 2 or 6 fields, got " + std::to_string(fields.size()));
        int label = 0;
        if (!parse_number(fields[1], label)) throw ParseError(where + ": bad label id '" + fields[1] + "'");
        if (fields.size() == 6) {
            Rgb c;
            if (!parse_number(fields[3], c.r) || !parse_number(fields[4], c.g) || !parse_number(fields[5], c.b))
                throw ParseError(where + ": bad color");
            for (double ch : {c.r, c.g, c.b})
                if (!(ch >= 0.0 && ch <= 1.0)) throw DomainError(where + ": color channel outside [0,1]");
            declared[label] = Region{fields[2], c, 0.0, mesh.hemisphere};
        }
        if (fields[0] == "*") {
            default_label = label;
            continue;
        }
        long vid = 0;
        if (!parse_number(fields[0], vid)) throw ParseError(where + ": bad vertex id '" + fields[0] + "'");
        if (vid < 0 || static_cast<std::size_t>(vid) >= nv)
            throw DomainError(where + ": vertex id " + std::to_string(vid) + " out of range (mesh has " +
                              std::to_string(nv) + " vertices)");
        if (covered[vid]) throw DomainError(where + ": duplicate row for vertex " + std::to_string(vid));
        covered[vid] = 1;
        labels[vid] = label;
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (covered[v]) continue;
        if (!default_label) {
            throw DomainError("vertex " + std::to_string(v) + " has no label row and no default label is declared");
        }
        labels[v] = *default_label;
    }

    TriMesh out = mesh;
    out.labels = std::move(labels);
    out.regions.clear();
    for (int id : std::set<int>(out.labels.begin(), out.labels.end())) {
        auto it = declared.find(id);
        out.regions[id] = it != declared.end()
                              ? it->second
                              : Region{"region_" + std::to_string(id), default_region_color(id), 0.0, mesh.hemisphere};
    }
    refresh_regions(out);
    return out;
}

TriMesh attach_labels(const TriMesh& mesh, const std::filesystem::path& csv) {
    return attach_labels_csv(mesh, read_file(csv));
}

int face_region(const TriMesh& mesh, std::size_t face) {
    const auto& f = mesh.faces.at(face);
    const int a = mesh.labels.at(f[0]), b = mesh.labels.at(f[1]), c = mesh.labels.at(f[2]);
    if (a == b || a == c) return a;
    if (b == c) return b;
    return std::min({a, b, c});
}

void refresh_regions(TriMesh& mesh) {
    if (!mesh.labeled()) {
        mesh.regions.clear();
        return;
    }
    const auto areas = vertex_areas(mesh);
    std::map<int, double> totals;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) totals[mesh.labels[v]] += areas[v];
    for (auto it = mesh.regions.begin(); it != mesh.regions.end();) {
        if (!totals.count(it->first)) {
            it = mesh.regions.erase(it);
        } else {
            ++it;
        }
    }
    for (const auto& [id, area] : totals) {
        auto [it, inserted] = mesh.regions.try_emplace(
            id, Region{"region_" + std::to_string(id), default_region_color(id), 0.0, mesh.hemisphere});
        it->second.area_mm2 = area;
    }
}

RegionRemoval remove_region(const TriMesh& mesh, int label_id) {
    if (!mesh.labeled()) throw DomainError("remove_region needs a labeled mesh");
    std::vector<Face> kept;
    kept.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        const bool inside =
            mesh.labels[f[0]] == label_id && mesh.labels[f[1]] == label_id && mesh.labels[f[2]] == label_id;
        if (!inside) kept.push_back(f);
    }
    RegionRemoval result;
    if (kept.size() == mesh.faces.size()) {
        result.mesh = mesh;
        result.old_to_new.resize(mesh.vertex_count());
        for (std::size_t i = 0; i < mesh.vertex_count(); ++i) result.old_to_new[i] = static_cast<int>(i);
        result.new_to_old = result.old_to_new;
        return result;
    }
    if (kept.empty()) throw TopologyError("removing region " + std::to_string(label_id) + " leaves an empty mesh");

    result.old_to_new.assign(mesh.vertex_count(), -1);
    for (const auto& f : kept)
        for (int c : f) result.old_to_new[c] = 0;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (result.old_to_new[v] < 0) continue;
        result.old_to_new[v] = static_cast<int>(result.new_to_old.size());
        result.new_to_old.push_back(static_cast<int>(v));
    }

    TriMesh out;
    out.hemisphere = mesh.hemisphere;
    out.vertices.reserve(result.new_to_old.size());
    out.labels.reserve(result.new_to_old.size());
    for (int old : result.new_to_old) {
        out.vertices.push_back(mesh.vertices[old]);
        out.labels.push_back(mesh.labels[old]);
    }
    for (const auto& [name, values] : mesh.channels) {
        auto& dst = out.channels[name];
        dst.reserve(result.new_to_old.size());
        for (int old : result.new_to_old) dst.push_back(values[old]);
    }
    out.faces.reserve(kept.size());
    for (const auto& f : kept)
        out.faces.push_back({result.old_to_new[f[0]], result.old_to_new[f[1]], result.old_to_new[f[2]]});
    out.regions = mesh.regions;

    // Vertices on the cut keep the removed label; fold them into their most
    // common other neighbouring label (ties to the smaller id) so the region
    // disappears from the table.
    std::vector<std::map<int, int>> votes(out.vertices.size());
    for (const auto& f : out.faces)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j && out.labels[f[i]] == label_id && out.labels[f[j]] != label_id) ++votes[f[i]][out.labels[f[j]]];
    std::vector<int> relabeled = out.labels;
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
        if (out.labels[v] != label_id) continue;
        int best = label_id, best_count = 0;
        for (const auto& [label, count] : votes[v])
            if (count > best_count) best = label, best_count = count;
        relabeled[v] = best;
    }
    out.labels = std::move(relabeled);

    const auto topo = topology_report(out);
    if (topo.components != 1) {
        throw TopologyError("removing region " + std::to_string(label_id) + " disconnects the mesh into " +
                            std::to_string(topo.components) + " components");
    }
    if (topo.euler_characteristic != 1 || topo.boundary_loops != 1) {
        throw TopologyError("removing region " + std::to_string(label_id) +
                            " does not leave a disk (chi = " + std::to_string(topo.euler_characteristic) +
                            ", boundary loops = " + std::to_string(topo.boundary_loops) + ")");
    }
    refresh_regions(out);
    result.mesh = std::move(out);
    return result;
}

}  // namespace cortex
