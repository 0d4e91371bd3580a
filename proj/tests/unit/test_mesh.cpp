#include <functional>
#include <cmath>
#include <set>

#include <doctest.h>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/mesh.hpp"

using namespace cortex;

namespace {

const char* kTriangleOff = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

TriMesh labeled(TriMesh mesh, const std::function<int(const Vec3&)>& label) {
    mesh.labels.clear();
    for (const auto& v : mesh.vertices) mesh.labels.push_back(label(v));
    for (int l : std::set<int>(mesh.labels.begin(), mesh.labels.end()))
        mesh.regions[l] = Region{"r" + std::to_string(l), default_region_color(l), 0.0, Hemisphere::left};
    refresh_regions(mesh);
    return mesh;
}

std::set<std::pair<int, int>> one_face_edges(const TriMesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& f : mesh.faces)
        for (int i = 0; i < 3; ++i) {
            const int a = f[i], b = f[(i + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::set<std::pair<int, int>> out;
    for (const auto& [e, n] : count)
        if (n == 1) out.insert(e);
    return out;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("single triangle OFF") {
    const auto mesh = parse_mesh(kTriangleOff, MeshFormat::off);
    CHECK(mesh.vertex_count() == 3);
    CHECK(mesh.face_count() == 1);
    const auto loops = boundary_loops(mesh);
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].size() == 3);
    CHECK_NOTHROW(validate_disk_topology(mesh));
}

TEST_CASE("face index out of range") {
    CHECK_THROWS_AS(parse_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 99\n", MeshFormat::off), TopologyError);
    CHECK_THROWS_AS(parse_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n", MeshFormat::off), ParseError);
}

TEST_CASE("icosphere is not a disk") {
    const auto sphere = parse_mesh(format_mesh(synth::icosphere(2), MeshFormat::off), MeshFormat::off);
    const auto report = topology_report(sphere);
    CHECK(report.euler_characteristic == 2);
    CHECK(boundary_loops(sphere).empty());
    CHECK_THROWS_AS(validate_disk_topology(sphere), TopologyError);
}

TEST_CASE("winding is repaired to agree with face 0") {
    std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const auto mesh = make_mesh(v, {{0, 1, 2}, {0, 3, 2}});
    // Shared edge 0-2 must now be traversed in opposite directions.
    CHECK(mesh.faces[1] != Face{0, 3, 2});
    CHECK(boundary_loops(mesh).size() == 1);
}

TEST_CASE("labels csv") {
    const auto tri = synth::single_triangle();
    SUBCASE("one label everywhere") {
        const auto m = attach_labels_csv(tri, "0,7\n1,7\n2,7\n");
        REQUIRE(m.regions.size() == 1);
        CHECK(m.regions.at(7).area_mm2 == doctest::Approx(surface_area(tri)).epsilon(1e-14));
    }
    SUBCASE("row beyond the mesh") { CHECK_THROWS_AS(attach_labels_csv(tri, "0,1\n1,1\n2,1\n5,1\n"), DomainError); }
    SUBCASE("2/1 split follows vertex area shares") {
        const auto m = attach_labels_csv(tri, "vertex_id,label_id,label_name,r,g,b\n0,1,a,1,0,0\n1,1,a,1,0,0\n2,2,b,0,0,1\n");
        // Each vertex holds a third of the triangle.
        const double area = surface_area(tri);
        CHECK(m.regions.at(1).area_mm2 == doctest::Approx(2.0 * area / 3.0).epsilon(1e-14));
        CHECK(m.regions.at(2).area_mm2 == doctest::Approx(area / 3.0).epsilon(1e-14));
        CHECK(m.regions.at(2).name == "b");
    }
    SUBCASE("default row") {
        const auto m = attach_labels_csv(tri, "*,4\n1,5\n");
        CHECK(m.labels == std::vector<int>{4, 5, 4});
    }
    SUBCASE("missing rows without default") { CHECK_THROWS_AS(attach_labels_csv(tri, "0,1\n"), DomainError); }
}

TEST_CASE("face region is the majority corner label, ties to the smallest") {
    auto m = attach_labels_csv(synth::single_triangle(), "0,3\n1,3\n2,1\n");
    CHECK(face_region(m, 0) == 3);
    m = attach_labels_csv(synth::single_triangle(), "0,9\n1,4\n2,6\n");
    CHECK(face_region(m, 0) == 4);
}

TEST_CASE("remove a polar cap from an icosphere") {
    const auto sphere = labeled(synth::icosphere(3), [](const Vec3& p) { return p.z() > 0.8 ? 1 : 2; });
    const auto removal = remove_region(sphere, 1);
    const auto report = topology_report(removal.mesh);
    CHECK(report.euler_characteristic == 1);
    CHECK(report.boundary_loops == 1);
    CHECK(report.components == 1);
    CHECK_NOTHROW(validate_disk_topology(removal.mesh));
    CHECK(removal.mesh.regions.count(1) == 0);
    for (std::size_t v = 0; v < removal.new_to_old.size(); ++v)
        CHECK(removal.old_to_new[removal.new_to_old[v]] == static_cast<int>(v));
}

TEST_CASE("removing an unused label is the identity") {
    const auto sphere = labeled(synth::hemisphere(6), [](const Vec3&) { return 2; });
    const auto removal = remove_region(sphere, 99);
    CHECK(removal.mesh.vertices == sphere.vertices);
    CHECK(removal.mesh.faces == sphere.faces);
    CHECK(removal.mesh.labels == sphere.labels);
}

TEST_CASE("removing a separating band disconnects") {
    const auto sphere =
        labeled(synth::icosphere(3), [](const Vec3& p) { return std::abs(p.z()) < 0.4 ? 1 : (p.z() > 0 ? 2 : 3); });
    CHECK_THROWS_AS(remove_region(sphere, 1), TopologyError);
}

TEST_CASE("boundary loops") {
    CHECK(boundary_loops(synth::single_triangle()).size() == 1);
    CHECK(boundary_loops(synth::icosphere(1)).empty());
    const auto ring = synth::annulus(24);
    const auto loops = boundary_loops(ring);
    REQUIRE(loops.size() == 2);
    CHECK(loops[0].size() >= loops[1].size());

    // Concatenated loop edges are exactly the one-face edges.
    std::set<std::pair<int, int>> from_loops;
    for (const auto& loop : loops)
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i], b = loop[(i + 1) % loop.size()];
            from_loops.insert({std::min(a, b), std::max(a, b)});
        }
    CHECK(from_loops == one_face_edges(ring));
    for (const auto& loop : loops) CHECK(loop.front() == *std::min_element(loop.begin(), loop.end()));
}

TEST_CASE("flat disk boundary starts at (1,0) and runs counter-clockwise") {
    const auto disk = synth::flat_disk(5);
    const auto loop = boundary_loops(disk).at(0);
    CHECK(disk.vertices[loop[0]].x() == doctest::Approx(1.0));
    CHECK(disk.vertices[loop[0]].y() == doctest::Approx(0.0));
    CHECK(disk.vertices[loop[1]].y() > 0.0);
}

TEST_CASE("cotangent weights in closed form") {
    const auto eq = cotangent_weights(synth::equilateral_triangle());
    for (double w : eq.weights) CHECK(w == doctest::Approx(0.5 / std::sqrt(3.0)).epsilon(1e-14));

    const auto ri = synth::right_isoceles_triangle();
    const auto rw = cotangent_weights(ri);
    // The edge opposite the right angle joins the two 45-degree corners.
    int hyp_a = -1, hyp_b = -1;
    for (int i = 0; i < 3; ++i) {
        const Vec3 u = ri.vertices[(i + 1) % 3] - ri.vertices[i], v = ri.vertices[(i + 2) % 3] - ri.vertices[i];
        if (std::abs(u.dot(v)) < 1e-15) hyp_a = (i + 1) % 3, hyp_b = (i + 2) % 3;
    }
    REQUIRE(hyp_a >= 0);
    CHECK(std::abs(*rw.weight(hyp_a, hyp_b)) < 1e-15);

    const auto sq = synth::unit_square();
    const auto sw = cotangent_weights(sq);
    // The diagonal faces the two right-angled corners, so its weight is
    // 1/2 (cot 90 + cot 90) = 0. Each side faces a single 45 degree angle.
    int diagonals = 0;
    for (std::size_t e = 0; e < sw.edges.size(); ++e) {
        if (!sw.boundary[e]) {
            ++diagonals;
            CHECK(std::abs(sw.weights[e]) < 1e-15);
        } else {
            CHECK(sw.weights[e] == doctest::Approx(0.5).epsilon(1e-14));
        }
    }
    CHECK(diagonals == 1);
    CHECK_FALSE(sw.weight(0, 0).has_value());
}

TEST_CASE("needle triangles clamp their cotangents") {
    const auto m = make_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, 1e-9, 0}}, {{0, 1, 2}});
    for (double w : cotangent_weights(m).weights) CHECK(std::abs(w) <= 0.5 * kCotangentClamp);
}

TEST_CASE("vertex areas sum to the surface area") {
    for (const auto& mesh : {synth::icosphere(3), synth::hemisphere(20), synth::cortex_hemisphere(Hemisphere::left, {.rings = 30})}) {
        const auto areas = vertex_areas(mesh);
        double sum = 0.0;
        for (double a : areas) sum += a;
        const double total = surface_area(mesh);
        CHECK(std::abs(sum - total) / total < 1e-12);
    }
}

TEST_CASE("json round trip is bit exact") {
    auto mesh = synth::cortex_hemisphere(Hemisphere::right, {.rings = 16});
    const auto back = parse_mesh(format_mesh(mesh, MeshFormat::json), MeshFormat::json);
    CHECK(back.vertices == mesh.vertices);
    CHECK(back.faces == mesh.faces);
    CHECK(back.labels == mesh.labels);
    CHECK(back.hemisphere == Hemisphere::right);
    CHECK(back.channels == mesh.channels);
    CHECK(mesh_digest(back) == mesh_digest(mesh));
}

TEST_CASE("off and vtk round trips keep topology") {
    const auto mesh = synth::hemisphere(8);
    for (auto fmt : {MeshFormat::off, MeshFormat::vtk}) {
        const auto back = parse_mesh(format_mesh(mesh, fmt), fmt);
        CHECK(back.faces == mesh.faces);
        for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
            CHECK((back.vertices[i] - mesh.vertices[i]).norm() < 1e-12);
    }
}

TEST_CASE("synthetic cortex hemisphere") {
    const auto lh = synth::cortex_hemisphere(Hemisphere::left, {.rings = 24});
    const auto rh = synth::cortex_hemisphere(Hemisphere::right, {.rings = 24});
    CHECK(topology_report(lh).euler_characteristic == 2);
    CHECK(lh.regions.count(0) == 1);
    CHECK(lh.channels.count("myelin") == 1);
    // Mirror image through x = 0.
    for (std::size_t i = 0; i < lh.vertex_count(); i += 37) {
        CHECK(rh.vertices[i].x() == -lh.vertices[i].x());
        CHECK(rh.vertices[i].y() == lh.vertices[i].y());
    }
    const auto cut = remove_region(lh, 0);
    CHECK_NOTHROW(validate_disk_topology(cut.mesh));
}

}
