#include <cstring>
#include <queue>
#include <string>
#include <unordered_map>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/mesh.hpp"
#include "edge_key.hpp"

namespace cortex {

std::string_view hemisphere_name(Hemisphere h) {
    switch (h) {
        case Hemisphere::left: return "left";
        case Hemisphere::right: return "right";
        case Hemisphere::other: return "other";
    }
    return "other";
}

Hemisphere parse_hemisphere(std::string_view name) {
    if (name == "left" || name == "lh" || name == "L") return Hemisphere::left;
    if (name == "right" || name == "rh" || name == "R") return Hemisphere::right;
    if (name == "other") return Hemisphere::other;
    throw DomainError("unknown hemisphere '" + std::string(name) + "'");
}

namespace {

void check_indices(std::size_t vertex_count, const std::vector<Face>& faces) {
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        for (int c : t) {
            if (c < 0 || static_cast<std::size_t>(c) >= vertex_count) {
                throw TopologyError("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(c) + " of " + std::to_string(vertex_count));
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw TopologyError("degenerate face " + std::to_string(f) + " repeats a vertex index");
        }
    }
}

// face ids incident to each undirected edge; throws on a third face.
std::unordered_map<std::uint64_t, std::array<int, 2>> edge_faces(const std::vector<Face>& faces) {
    std::unordered_map<std::uint64_t, std::array<int, 2>> map;
    map.reserve(faces.size() * 2);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int e = 0; e < 3; ++e) {
            const int a = faces[f][e];
            const int b = faces[f][(e + 1) % 3];
            auto [it, inserted] = map.try_emplace(detail::edge_key(a, b), std::array<int, 2>{-1, -1});
            auto& slot = it->second;
            if (slot[0] < 0) {
                slot[0] = static_cast<int>(f);
            } else if (slot[1] < 0) {
                slot[1] = static_cast<int>(f);
            } else {
                throw TopologyError("non-manifold edge (" + std::to_string(std::min(a, b)) + ", " +
                                    std::to_string(std::max(a, b)) + ") borders more than two faces");
            }
        }
    }
    return map;
}

// True when `face` traverses a -> b in its winding.
bool has_directed_edge(const Face& face, int a, int b) {
    for (int e = 0; e < 3; ++e)
        if (face[e] == a && face[(e + 1) % 3] == b) return true;
    return false;
}

void check_areas(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
        if (!(n.norm() > 0.0)) {
            throw TopologyError("face " + std::to_string(f) + " has zero area");
        }
    }
}

}  // namespace

std::size_t repair_orientation(std::vector<Face>& faces) {
    const auto edges = edge_faces(faces);
    std::vector<char> visited(faces.size(), 0);
    std::size_t flipped = 0;
    for (std::size_t seed = 0; seed < faces.size(); ++seed) {
        if (visited[seed]) continue;
        visited[seed] = 1;
        std::queue<int> queue;
        queue.push(static_cast<int>(seed));
        while (!queue.empty()) {
            const int f = queue.front();
            queue.pop();
            for (int e = 0; e < 3; ++e) {
                const int a = faces[f][e];
                const int b = faces[f][(e + 1) % 3];
                const auto& pair = edges.at(detail::edge_key(a, b));
                const int g = pair[0] == f ? pair[1] : pair[0];
                if (g < 0) continue;
                // A consistently oriented neighbour traverses the shared edge b -> a.
                const bool agrees = has_directed_edge(faces[g], b, a);
                if (visited[g]) {
                    if (!agrees) {
                        throw TopologyError("mesh is not orientable (conflict at edge (" +
                                            std::to_string(std::min(a, b)) + ", " +
                                            std::to_string(std::max(a, b)) + "))");
                    }
                    continue;
                }
                if (!agrees) {
                    std::swap(faces[g][1], faces[g][2]);
                    ++flipped;
                }
                visited[g] = 1;
                queue.push(g);
            }
        }
    }
    return flipped;
}

void validate_mesh(const TriMesh& mesh) {
    if (mesh.vertices.empty() || mesh.faces.empty()) throw TopologyError("empty mesh");
    check_indices(mesh.vertices.size(), mesh.faces);
    edge_faces(mesh.faces);
    check_areas(mesh.vertices, mesh.faces);
    for (const auto& v : mesh.vertices)
        if (!v.allFinite()) throw ParseError("non-finite vertex coordinate");
    if (mesh.labeled() && mesh.labels.size() != mesh.vertices.size())
        throw TopologyError("label count does not match vertex count");
    for (const auto& [name, values] : mesh.channels)
        if (values.size() != mesh.vertices.size())
            throw TopologyError("channel '" + name + "' length does not match vertex count");
}

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces, Hemisphere hemisphere) {
    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.faces = std::move(faces);
    mesh.hemisphere = hemisphere;
    validate_mesh(mesh);
    repair_orientation(mesh.faces);
    return mesh;
}

std::string mesh_digest(const TriMesh& mesh) {
    std::string bytes;
    bytes.reserve(mesh.vertices.size() * 24 + mesh.faces.size() * 12);
    for (const auto& v : mesh.vertices) {
        char buf[24];
        std::memcpy(buf, v.data(), 24);
        bytes.append(buf, 24);
    }
    for (const auto& f : mesh.faces) {
        char buf[12];
        std::memcpy(buf, f.data(), 12);
        bytes.append(buf, 12);
    }
    return sha256_hex(bytes).substr(0, 16);
}

}  // namespace cortex
