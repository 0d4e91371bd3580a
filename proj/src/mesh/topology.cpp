#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/mesh.hpp"
#include "edge_key.hpp"

namespace cortex {

namespace {

std::unordered_map<std::uint64_t, int> edge_use_counts(const std::vector<Face>& faces) {
    std::unordered_map<std::uint64_t, int> counts;
    counts.reserve(faces.size() * 2);
    for (const auto& f : faces)
        for (int e = 0; e < 3; ++e) ++counts[detail::edge_key(f[e], f[(e + 1) % 3])];
    return counts;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh) {
    const auto counts = edge_use_counts(mesh.faces);
    // Outgoing boundary half-edges per vertex, in face winding direction.
    std::map<int, std::vector<int>> outgoing;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3];
            if (counts.at(detail::edge_key(a, b)) == 1) outgoing[a].push_back(b);
        }
    }
    for (auto& [v, targets] : outgoing) std::sort(targets.begin(), targets.end(), std::greater<>());

    std::vector<std::vector<int>> loops;
    while (!outgoing.empty()) {
        const int start = outgoing.begin()->first;
        std::vector<int> loop{start};
        int current = start;
        while (true) {
            auto it = outgoing.find(current);
            if (it == outgoing.end()) break;  // open chain; only on non-manifold input
            const int next = it->second.back();
            it->second.pop_back();
            if (it->second.empty()) outgoing.erase(it);
            if (next == start) break;
            loop.push_back(next);
            current = next;
        }
        std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
        loops.push_back(std::move(loop));
    }
    std::stable_sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return loops;
}

TopologyReport topology_report(const TriMesh& mesh) {
    TopologyReport r;
    const auto counts = edge_use_counts(mesh.faces);
    std::vector<char> used(mesh.vertex_count(), 0);
    DisjointSet sets(mesh.vertex_count());
    for (const auto& f : mesh.faces) {
        for (int c : f) used[c] = 1;
        sets.unite(f[0], f[1]);
        sets.unite(f[1], f[2]);
    }
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (used[v]) {
            ++r.vertices;
            if (sets.find(static_cast<int>(v)) == static_cast<int>(v)) ++r.components;
        } else {
            ++r.isolated_vertices;
        }
    }
    r.edges = counts.size();
    r.faces = mesh.face_count();
    r.euler_characteristic =
        static_cast<long>(r.vertices) - static_cast<long>(r.edges) + static_cast<long>(r.faces);
    r.boundary_loops = boundary_loops(mesh).size();
    return r;
}

void validate_disk_topology(const TriMesh& mesh) {
    const auto r = topology_report(mesh);
    if (r.components != 1 || r.euler_characteristic != 1 || r.boundary_loops != 1) {
        throw TopologyError("mesh is not a topological disk (components = " + std::to_string(r.components) +
                            ", chi = " + std::to_string(r.euler_characteristic) +
                            ", boundary loops = " + std::to_string(r.boundary_loops) + ")");
    }
}

}  // namespace cortex
