#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "cortex_atlas/mesh.hpp"

namespace cortex::synth {

namespace {

constexpr double kPi = std::numbers::pi;

struct Ring {
    std::vector<int> ids;
    double offset = 0.0;  // angle of ids[0]
};

double ring_angle(const Ring& r, std::size_t i) {
    return r.offset + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(r.ids.size());
}

// Triangulates the strip between two concentric rings by merging their
// angular orders.
void zip_rings(const Ring& a, const Ring& b, std::vector<Face>& faces) {
    const std::size_t na = a.ids.size(), nb = b.ids.size();
    if (na == 1) {
        for (std::size_t j = 0; j < nb; ++j) faces.push_back({a.ids[0], b.ids[(j + 1) % nb], b.ids[j]});
        return;
    }
    if (nb == 1) {
        for (std::size_t i = 0; i < na; ++i) faces.push_back({a.ids[i], a.ids[(i + 1) % na], b.ids[0]});
        return;
    }
    std::size_t i = 0, j = 0;
    while (i < na || j < nb) {
        const bool advance_a = j == nb || (i < na && ring_angle(a, i + 1) <= ring_angle(b, j + 1));
        if (advance_a) {
            faces.push_back({a.ids[i % na], a.ids[(i + 1) % na], b.ids[j % nb]});
            ++i;
        } else {
            faces.push_back({a.ids[i % na], b.ids[(j + 1) % nb], b.ids[j % nb]});
            ++j;
        }
    }
}

// Flips every face if the summed orientation test disagrees with `outward`.
void orient(const std::vector<Vec3>& v, std::vector<Face>& faces, const std::function<Vec3(const Vec3&)>& outward) {
    double score = 0.0;
    for (const auto& f : faces) {
        const Vec3 n = (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]);
        const Vec3 c = (v[f[0]] + v[f[1]] + v[f[2]]) / 3.0;
        score += n.dot(outward(c));
    }
    if (score < 0)
        for (auto& f : faces) std::swap(f[1], f[2]);
}

// Rings of unit directions at polar angles phi[r]; a single-vertex ring sits
// on a pole. The last ring starts at angle 0, the others alternate a half
// step to keep triangles well shaped.
void build_rings(const std::vector<double>& phi, const std::vector<int>& counts, std::vector<Vec3>& vertices,
                 std::vector<Face>& faces, double z_sign) {
    std::vector<Ring> rings;
    for (std::size_t r = 0; r < phi.size(); ++r) {
        Ring ring;
        const int m = counts[r];
        const bool last = r + 1 == phi.size();
        ring.offset = (last || m == 1) ? 0.0 : (r % 2 ? kPi / m : 0.0);
        for (int i = 0; i < m; ++i) {
            const double theta = ring.offset + 2.0 * kPi * i / m;
            const double s = m == 1 ? 0.0 : std::sin(phi[r]);
            ring.ids.push_back(static_cast<int>(vertices.size()));
            vertices.emplace_back(s * std::cos(theta), s * std::sin(theta), z_sign * std::cos(phi[r]));
        }
        rings.push_back(std::move(ring));
    }
    for (std::size_t r = 0; r + 1 < rings.size(); ++r) zip_rings(rings[r], rings[r + 1], faces);
}

}  // namespace

TriMesh single_triangle() {
    return make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
}

TriMesh unit_square() {
    return make_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

TriMesh equilateral_triangle() {
    return make_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}}, {{0, 1, 2}});
}

TriMesh right_isoceles_triangle() {
    return make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
}

TriMesh icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                           {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const int id = static_cast<int>(v.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<Face> next;
        for (const auto& tri : f) {
            const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    orient(v, f, [](const Vec3& c) { return c; });
    return make_mesh(std::move(v), std::move(f));
}

TriMesh flat_disk(int rings) {
    std::vector<Vec3> v;
    std::vector<Face> f;
    std::vector<Ring> rs;
    Ring center;
    center.ids.push_back(0);
    v.emplace_back(0, 0, 0);
    rs.push_back(center);
    for (int r = 1; r <= rings; ++r) {
        Ring ring;
        const int m = 6 * r;
        ring.offset = (r == rings) ? 0.0 : (r % 2 ? kPi / m : 0.0);
        const double radius = static_cast<double>(r) / rings;
        for (int i = 0; i < m; ++i) {
            const double theta = ring.offset + 2.0 * kPi * i / m;
            ring.ids.push_back(static_cast<int>(v.size()));
            v.emplace_back(radius * std::cos(theta), radius * std::sin(theta), 0.0);
        }
        rs.push_back(std::move(ring));
    }
    // Exact unit-circle positions on the boundary.
    for (std::size_t i = 0; i < rs.back().ids.size(); ++i) {
        const double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(rs.back().ids.size());
        v[rs.back().ids[i]] = Vec3(std::cos(theta), std::sin(theta), 0.0);
    }
    for (std::size_t r = 0; r + 1 < rs.size(); ++r) zip_rings(rs[r], rs[r + 1], f);
    orient(v, f, [](const Vec3&) { return Vec3(0, 0, 1); });
    return make_mesh(std::move(v), std::move(f));
}

TriMesh hemisphere(int rings) {
    std::vector<double> phi{0.0};
    std::vector<int> counts{1};
    for (int r = 1; r <= rings; ++r) {
        const double p = 0.5 * kPi * r / rings;
        phi.push_back(p);
        counts.push_back(std::max(6, static_cast<int>(std::lround(4.0 * rings * std::sin(p)))));
    }
    std::vector<Vec3> v;
    std::vector<Face> f;
    build_rings(phi, counts, v, f, -1.0);
    for (auto& p : v)
        if (std::fabs(p.z()) < 1e-15) p.z() = 0.0;
    orient(v, f, [](const Vec3& c) { return c; });
    return make_mesh(std::move(v), std::move(f));
}

TriMesh annulus(int segments) {
    std::vector<Vec3> v;
    std::vector<Face> f;
    std::vector<Ring> rs;
    for (int r = 0; r < 3; ++r) {
        Ring ring;
        ring.offset = (r == 1) ? kPi / segments : 0.0;
        const double radius = 0.5 + 0.25 * r;
        for (int i = 0; i < segments; ++i) {
            const double theta = ring.offset + 2.0 * kPi * i / segments;
            ring.ids.push_back(static_cast<int>(v.size()));
            v.emplace_back(radius * std::cos(theta), radius * std::sin(theta), 0.0);
        }
        rs.push_back(std::move(ring));
    }
    zip_rings(rs[0], rs[1], f);
    zip_rings(rs[1], rs[2], f);
    orient(v, f, [](const Vec3&) { return Vec3(0, 0, 1); });
    return make_mesh(std::move(v), std::move(f));
}

TriMesh ring_sphere(int rings, double radius) {
    std::vector<double> phi;
    std::vector<int> counts;
    for (int r = 0; r <= rings; ++r) {
        const double p = kPi * r / rings;
        phi.push_back(p);
        counts.push_back((r == 0 || r == rings) ? 1
                                                : std::max(6, static_cast<int>(std::lround(2.0 * rings * std::sin(p)))));
    }
    std::vector<Vec3> v;
    std::vector<Face> f;
    build_rings(phi, counts, v, f, 1.0);
    for (auto& p : v) p *= radius;
    orient(v, f, [](const Vec3& c) { return c; });
    return make_mesh(std::move(v), std::move(f));
}

TriMesh cortex_hemisphere(Hemisphere side, const CortexOptions& o) {
    TriMesh base = ring_sphere(o.rings, 1.0);
    const double medial_cut = 0.72 * kPi;  // polar angle where the medial wall starts
    std::vector<Vec3> v(base.vertex_count());
    std::vector<int> labels(base.vertex_count());
    std::vector<double> myelin(base.vertex_count());
    for (std::size_t i = 0; i < base.vertex_count(); ++i) {
        const Vec3 d = base.vertices[i].normalized();
        const double phi = std::acos(std::clamp(d.z(), -1.0, 1.0));
        double lambda = std::atan2(d.y(), d.x());
        if (lambda < 0) lambda += 2.0 * kPi;
        const double r = o.radius_mm * (1.0 + o.fold_amplitude * std::sin(5.0 * lambda) * std::sin(3.0 * phi));
        const Vec3 p = r * d;
        // South pole (the medial cap) turns to face the midline at x = 0.
        Vec3 q(-p.z(), p.y(), p.x());
        q.x() -= o.x_offset_mm;
        if (side == Hemisphere::right) q.x() = -q.x();
        v[i] = q;
        if (phi >= medial_cut) {
            labels[i] = 0;
        } else {
            const int band = std::min(o.bands - 1, static_cast<int>(phi / medial_cut * o.bands));
            const int sector = std::min(o.sectors - 1, static_cast<int>(lambda / (2.0 * kPi) * o.sectors));
            labels[i] = 1 + band * o.sectors + sector;
        }
        myelin[i] = 1.0 + 0.5 * std::cos(phi) + 0.25 * std::sin(3.0 * lambda) * std::sin(phi);
    }
    auto faces = base.faces;
    if (side == Hemisphere::right)
        for (auto& f : faces) std::swap(f[1], f[2]);
    TriMesh mesh = make_mesh(std::move(v), std::move(faces), side);
    mesh.labels = std::move(labels);
    mesh.channels["myelin"] = std::move(myelin);
    const char* prefix = side == Hemisphere::right ? "rh" : "lh";
    mesh.regions[0] = Region{std::string(prefix) + ".medialwall", Rgb{0.5, 0.5, 0.5}, 0.0, side};
    for (int band = 0; band < o.bands; ++band) {
        for (int sector = 0; sector < o.sectors; ++sector) {
            const int id = 1 + band * o.sectors + sector;
            mesh.regions[id] = Region{std::string(prefix) + ".gyrus" + std::to_string(id), default_region_color(id),
                                      0.0, side};
        }
    }
    refresh_regions(mesh);
    return mesh;
}

}  // namespace cortex::synth
