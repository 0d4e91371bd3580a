#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/mesh.hpp"

namespace cortex {

namespace {

// Whitespace tokenizer that drops '#' comments to end of line.
class Tokens {
public:
    explicit Tokens(std::string_view text) : text_(text) {}

    bool next(std::string_view& out) {
        skip();
        if (pos_ >= text_.size()) return false;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '#')
            ++pos_;
        out = text_.substr(start, pos_ - start);
        return true;
    }

    std::string_view expect(const char* what) {
        std::string_view t;
        if (!next(t)) throw ParseError(std::string("unexpected end of file, expected ") + what);
        return t;
    }

    double real(const char* what) {
        const auto t = expect(what);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ParseError(std::string("malformed ") + what + ": '" + std::string(t) + "'");
        return v;
    }

    long integer(const char* what) {
        const auto t = expect(what);
        long v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ParseError(std::string("malformed ") + what + ": '" + std::string(t) + "'");
        return v;
    }

    // Skips the remainder of the current line.
    void skip_line() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

private:
    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                skip_line();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

TriMesh parse_off(std::string_view text) {
    Tokens tok(text);
    const auto header = tok.expect("OFF header");
    if (header != "OFF") throw ParseError("missing OFF header");
    const long nv = tok.integer("vertex count");
    const long nf = tok.integer("face count");
    tok.integer("edge count");
    if (nv < 0 || nf < 0) throw ParseError("negative element count");
    std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
    for (auto& v : vertices) {
        v.x() = tok.real("vertex coordinate");
        v.y() = tok.real("vertex coordinate");
        v.z() = tok.real("vertex coordinate");
    }
    std::vector<Face> faces(static_cast<std::size_t>(nf));
    for (auto& f : faces) {
        const long n = tok.integer("face arity");
        if (n != 3) throw ParseError("only triangular faces are supported (got arity " + std::to_string(n) + ")");
        for (auto& c : f) c = static_cast<int>(tok.integer("face index"));
        tok.skip_line();  // optional per-face colour
    }
    return make_mesh(std::move(vertices), std::move(faces));
}

TriMesh parse_vtk(std::string_view text) {
    std::istringstream lines{std::string(text)};
    std::string line;
    if (!std::getline(lines, line) || line.rfind("# vtk DataFile", 0) != 0)
        throw ParseError("missing VTK header line");
    std::getline(lines, line);  // title
    if (!std::getline(lines, line) || line.find("ASCII") == std::string::npos)
        throw ParseError("only ASCII legacy VTK is supported");
    const auto rest_offset = static_cast<std::size_t>(lines.tellg());
    Tokens tok(text.substr(std::min(rest_offset, text.size())));

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    bool have_points = false;
    bool have_polys = false;
    std::string_view t;
    while (tok.next(t)) {
        if (t == "DATASET") {
            if (tok.expect("dataset type") != "POLYDATA") throw ParseError("only POLYDATA datasets are supported");
        } else if (t == "POINTS") {
            const long n = tok.integer("point count");
            tok.expect("point type");
            if (n < 0) throw ParseError("negative point count");
            vertices.resize(static_cast<std::size_t>(n));
            for (auto& v : vertices) {
                v.x() = tok.real("point coordinate");
                v.y() = tok.real("point coordinate");
                v.z() = tok.real("point coordinate");
            }
            have_points = true;
        } else if (t == "POLYGONS") {
            const long n = tok.integer("polygon count");
            tok.integer("polygon list size");
            if (n < 0) throw ParseError("negative polygon count");
            faces.resize(static_cast<std::size_t>(n));
            for (auto& f : faces) {
                const long arity = tok.integer("polygon arity");
                if (arity != 3) throw ParseError("only triangular polygons are supported");
                for (auto& c : f) c = static_cast<int>(tok.integer("polygon index"));
            }
            have_polys = true;
        } else {
            throw ParseError("unsupported VTK section '" + std::string(t) + "'");
        }
    }
    if (!have_points || !have_polys) throw ParseError("VTK file needs POINTS and POLYGONS");
    return make_mesh(std::move(vertices), std::move(faces));
}

TriMesh parse_json_mesh(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mesh JSON: ") + e.what());
    }
    try {
        std::vector<Vec3> vertices;
        for (const auto& v : doc.at("vertices")) {
            if (v.size() != 3) throw ParseError("vertex must have 3 coordinates");
            vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        }
        std::vector<Face> faces;
        for (const auto& f : doc.at("faces")) {
            if (f.size() != 3) throw ParseError("face must have 3 indices");
            faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
        }
        const Hemisphere hemi =
            doc.contains("hemisphere") ? parse_hemisphere(doc["hemisphere"].get<std::string>()) : Hemisphere::other;
        TriMesh mesh = make_mesh(std::move(vertices), std::move(faces), hemi);
        if (doc.contains("channels")) {
            for (const auto& [name, values] : doc["channels"].items()) {
                mesh.channels[name] = values.get<std::vector<double>>();
            }
        }
        if (doc.contains("labels") && !doc["labels"].empty()) {
            mesh.labels = doc["labels"].get<std::vector<int>>();
            if (doc.contains("regions")) {
                for (const auto& r : doc["regions"]) {
                    Region region;
                    region.name = r.at("name").get<std::string>();
                    const auto& c = r.at("color");
                    region.color = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
                    region.hemisphere = hemi;
                    mesh.regions[r.at("id").get<int>()] = region;
                }
            }
            for (int id : mesh.labels) {
                if (!mesh.regions.count(id)) {
                    mesh.regions[id] = Region{"region_" + std::to_string(id), default_region_color(id), 0.0, hemi};
                }
            }
        }
        validate_mesh(mesh);
        if (mesh.labeled()) refresh_regions(mesh);
        return mesh;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mesh JSON: ") + e.what());
    }
}

std::string format_off(const TriMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return out.str();
}

std::string format_vtk(const TriMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    out << "# vtk DataFile Version 3.0\ncortex-atlas mesh\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    out << "POLYGONS " << mesh.faces.size() << ' ' << mesh.faces.size() * 4 << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return out.str();
}

std::string format_json_mesh(const TriMesh& mesh) {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["hemisphere"] = std::string(hemisphere_name(mesh.hemisphere));
    auto& vertices = doc["vertices"] = nlohmann::json::array();
    for (const auto& v : mesh.vertices) vertices.push_back({v.x(), v.y(), v.z()});
    auto& faces = doc["faces"] = nlohmann::json::array();
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    doc["labels"] = mesh.labels;
    auto& regions = doc["regions"] = nlohmann::json::array();
    for (const auto& [id, r] : mesh.regions) {
        regions.push_back({{"id", id}, {"name", r.name}, {"color", {r.color.r, r.color.g, r.color.b}}});
    }
    doc["channels"] = nlohmann::json::object();
    for (const auto& [name, values] : mesh.channels) doc["channels"][name] = values;
    return doc.dump() + "\n";
}

}  // namespace

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::off;
    if (ext == ".vtk") return MeshFormat::vtk;
    if (ext == ".json") return MeshFormat::json;
    throw ParseError("cannot infer mesh format from '" + path.string() + "'");
}

std::optional<MeshFormat> parse_mesh_format(std::string_view name) {
    if (name == "off" || name == "OFF") return MeshFormat::off;
    if (name == "vtk" || name == "VTK") return MeshFormat::vtk;
    if (name == "json" || name == "JSON") return MeshFormat::json;
    return std::nullopt;
}

TriMesh parse_mesh(std::string_view text, MeshFormat format) {
    switch (format) {
        case MeshFormat::off: return parse_off(text);
        case MeshFormat::vtk: return parse_vtk(text);
        case MeshFormat::json: return parse_json_mesh(text);
    }
    throw ParseError("unknown mesh format");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    return parse_mesh(read_file(path), format);
}

TriMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, mesh_format_from_path(path)); }

std::string format_mesh(const TriMesh& mesh, MeshFormat format) {
    switch (format) {
        case MeshFormat::off: return format_off(mesh);
        case MeshFormat::vtk: return format_vtk(mesh);
        case MeshFormat::json: return format_json_mesh(mesh);
    }
    return {};
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
    write_file(path, format_mesh(mesh, format));
}

}  // namespace cortex
