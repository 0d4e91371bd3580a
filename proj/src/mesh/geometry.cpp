#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cortex_atlas/mesh.hpp"
#include "edge_key.hpp"

namespace cortex {

namespace {

double clamped_cot(const Vec3& apex, const Vec3& p, const Vec3& q) {
    const Vec3 u = p - apex;
    const Vec3 v = q - apex;
    const double sin_area = u.cross(v).norm();
    const double cos_term = u.dot(v);
    if (sin_area == 0.0) return std::copysign(kCotangentClamp, cos_term == 0.0 ? 1.0 : cos_term);
    return std::clamp(cos_term / sin_area, -kCotangentClamp, kCotangentClamp);
}

}  // namespace

std::optional<double> EdgeWeights::weight(int i, int j) const {
    const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
    const auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return std::nullopt;
    return weights[static_cast<std::size_t>(it - edges.begin())];
}

EdgeWeights cotangent_weights(const TriMesh& mesh) {
    std::unordered_map<std::uint64_t, std::pair<double, int>> acc;
    acc.reserve(mesh.face_count() * 2);
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3], apex = f[(e + 2) % 3];
            auto& slot = acc[detail::edge_key(a, b)];
            slot.first += 0.5 * clamped_cot(mesh.vertices[apex], mesh.vertices[a], mesh.vertices[b]);
            slot.second += 1;
        }
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(acc.size());
    for (const auto& [k, v] : acc) keys.push_back(k);
    std::sort(keys.begin(), keys.end());

    EdgeWeights w;
    w.edges.reserve(keys.size());
    w.weights.reserve(keys.size());
    w.boundary.reserve(keys.size());
    for (auto k : keys) {
        const auto& slot = acc[k];
        w.edges.emplace_back(detail::edge_lo(k), detail::edge_hi(k));
        w.weights.push_back(slot.first);
        w.boundary.push_back(slot.second == 1);
    }
    return w;
}

std::vector<double> face_areas(const TriMesh& mesh) {
    std::vector<double> areas(mesh.face_count());
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        areas[f] = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                             .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                             .norm();
    }
    return areas;
}

double surface_area(const TriMesh& mesh) {
    double total = 0.0;
    for (double a : face_areas(mesh)) total += a;
    return total;
}

std::vector<double> vertex_areas(const TriMesh& mesh) {
    const auto areas = face_areas(mesh);
    std::vector<double> out(mesh.vertex_count(), 0.0);
    for (std::size_t f = 0; f < mesh.face_count(); ++f)
        for (int c : mesh.faces[f]) out[c] += areas[f] / 3.0;
    return out;
}

}  // namespace cortex
