#include <cmath>
#include <numbers>

#include <doctest.h>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"
#include "oracles.hpp"

using namespace cortex;

namespace {

const TriMesh& hemisphere_fixture() {
    static const TriMesh mesh = synth::hemisphere(31);
    return mesh;
}

const DiskMap& hemisphere_map() {
    static const DiskMap map = harmonic_disk_map(hemisphere_fixture());
    return map;
}

DiskMap identity_map(const TriMesh& flat) {
    DiskMap map;
    for (const auto& v : flat.vertices) map.uv.emplace_back(v.x(), v.y());
    map.boundary = boundary_loops(flat).at(0);
    for (int b : map.boundary) map.boundary_param.push_back(std::atan2(flat.vertices[b].y(), flat.vertices[b].x()));
    return map;
}

}  // namespace

TEST_SUITE("param") {

TEST_CASE("flat disk maps to itself") {
    const auto disk = synth::flat_disk(12);
    SolveStats stats;
    const auto map = harmonic_disk_map(disk, &stats);
    CHECK(stats.relative_residual < kSolveTolerance);
    for (std::size_t i = 0; i < disk.vertex_count(); ++i) {
        CHECK(std::abs(map.uv[i].x() - disk.vertices[i].x()) < 1e-8);
        CHECK(std::abs(map.uv[i].y() - disk.vertices[i].y()) < 1e-8);
    }
}

TEST_CASE("single triangle goes to the circle by arc length") {
    const auto tri = synth::single_triangle();
    SolveStats stats;
    const auto map = harmonic_disk_map(tri, &stats);
    CHECK(stats.unknowns == 0);
    REQUIRE(map.boundary == std::vector<int>{0, 1, 2});
    const double perimeter = 2.0 + std::sqrt(2.0);
    const double angles[3] = {0.0, 2.0 * std::numbers::pi / perimeter,
                              2.0 * std::numbers::pi * (1.0 + std::sqrt(2.0)) / perimeter};
    for (int i = 0; i < 3; ++i) {
        CHECK(map.uv[i].x() == doctest::Approx(std::cos(angles[i])).epsilon(1e-14));
        CHECK(map.uv[i].y() == doctest::Approx(std::sin(angles[i])).epsilon(1e-14));
        CHECK(map.boundary_param[i] == doctest::Approx(angles[i]).epsilon(1e-14));
    }
}

TEST_CASE("unit hemisphere: fold-free, interior strictly inside") {
    const auto& mesh = hemisphere_fixture();
    const auto& map = hemisphere_map();
    CHECK(mesh.face_count() > 4500);
    CHECK(oracle::flipped_faces(mesh, map.uv) == 0);
    CHECK(count_flipped(mesh, map.uv) == 0);
    std::vector<char> boundary(mesh.vertex_count(), 0);
    for (int b : map.boundary) boundary[b] = 1;
    double max_interior = 0.0, max_radius_error = 0.0;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (boundary[v]) max_radius_error = std::max(max_radius_error, std::abs(map.uv[v].norm() - 1.0));
        else max_interior = std::max(max_interior, map.uv[v].norm());
    }
    CHECK(max_interior < 1.0);
    CHECK(max_radius_error < 1e-9);
}

TEST_CASE("mean-value property at interior vertices") {
    const auto r = oracle::mean_value_residual(hemisphere_fixture(), hemisphere_map().uv, hemisphere_map().boundary);
    CHECK(r.max_relative < 1e-8);
    const auto cortex_mesh = remove_region(synth::cortex_hemisphere(Hemisphere::left, {.rings = 30}), 0).mesh;
    const auto map = harmonic_disk_map(cortex_mesh);
    CHECK(oracle::mean_value_residual(cortex_mesh, map.uv, map.boundary).max_relative < 1e-8);
    CHECK(oracle::flipped_faces(cortex_mesh, map.uv) == 0);
}

TEST_CASE("closed meshes are rejected") {
    CHECK_THROWS_AS(harmonic_disk_map(synth::icosphere(1)), TopologyError);
}

TEST_CASE("area_correct with max_iters = 0 is the identity") {
    const auto out = area_correct(hemisphere_map(), hemisphere_fixture(), {.max_iters = 0});
    CHECK(out.map.uv == hemisphere_map().uv);
    CHECK(out.iterations == 0);
}

TEST_CASE("area_correct leaves an area-uniform map alone") {
    // On the identity map of a flat disk every rho_f is the same constant,
    // which is where the gradient of E vanishes.
    const auto disk = synth::flat_disk(10);
    const auto map = identity_map(disk);
    const auto out = area_correct(map, disk);
    for (std::size_t i = 0; i < disk.vertex_count(); ++i) CHECK((out.map.uv[i] - map.uv[i]).norm() < 1e-12);
}

TEST_CASE("area_correct on the hemisphere") {
    const auto& mesh = hemisphere_fixture();
    const auto before = oracle::rms_log_area(mesh, hemisphere_map().uv);
    const auto out = area_correct(hemisphere_map(), mesh);
    const auto after = oracle::rms_log_area(mesh, out.map.uv);
    CHECK(after <= 0.5 * before);
    CHECK(oracle::flipped_faces(mesh, out.map.uv) == 0);
    REQUIRE(out.energy.size() == static_cast<std::size_t>(out.iterations) + 1);
    for (std::size_t i = 1; i < out.energy.size(); ++i) {
        CHECK(out.energy[i] <= out.energy[i - 1]);
        CHECK(out.rms_log_area[i] <= out.rms_log_area[i - 1]);
    }
    CHECK(out.energy.back() == doctest::Approx(area_energy(mesh, out.map.uv)).epsilon(1e-12));
    // Boundary stays put.
    for (int b : out.map.boundary) CHECK(out.map.uv[b] == hemisphere_map().uv[b]);
}

TEST_CASE("area_correct rejects folded input and bad config") {
    auto folded = hemisphere_map();
    std::swap(folded.uv[0], folded.uv[1]);
    CHECK_THROWS_AS(area_correct(folded, hemisphere_fixture()), DomainError);
    CHECK_THROWS_AS(area_correct(hemisphere_map(), hemisphere_fixture(), {.step = 0.0}), DomainError);
}

TEST_CASE("distortion against a per-face SVD") {
    const auto& mesh = hemisphere_fixture();
    const auto& map = hemisphere_map();
    const auto report = distortion_report(mesh, map);
    const auto a3 = face_areas(mesh);
    double total = 0.0;
    for (double a : a3) total += a;
    double mean_k = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        const auto s = oracle::face_singular_values(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]],
                                                    map.uv[t[0]], map.uv[t[1]], map.uv[t[2]]);
        const double k = s(0) / s(1);
        mean_k += k;
        CHECK(report.dilatation[f] == doctest::Approx(k).epsilon(1e-9));
        CHECK(report.dilatation[f] >= 1.0 - 1e-9);
        const double rho = s(0) * s(1) * total / std::numbers::pi;
        CHECK(report.area_ratio[f] == doctest::Approx(rho).epsilon(1e-9));
    }
    CHECK(report.mean_dilatation == doctest::Approx(mean_k / mesh.face_count()).epsilon(1e-12));
    CHECK(report.rms_log_area_ratio == doctest::Approx(oracle::rms_log_area(mesh, map.uv)).epsilon(1e-12));
}

TEST_CASE("isometric flattening, after normalization") {
    // A flat square of area pi flattened onto itself.
    const double s = std::sqrt(std::numbers::pi);
    const auto square = make_mesh({{0, 0, 0}, {s, 0, 0}, {s, s, 0}, {0, s, 0}}, {{0, 1, 2}, {0, 2, 3}});
    const auto report = distortion_report(square, identity_map(square));
    for (double k : report.dilatation) CHECK(k == doctest::Approx(1.0).epsilon(1e-14));
    for (double r : report.area_ratio) CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("doubling u gives K = 2") {
    const auto disk = synth::flat_disk(6);
    auto map = identity_map(disk);
    for (auto& p : map.uv) p.x() *= 2.0;
    for (double k : distortion_report(disk, map).dilatation) CHECK(k == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("distortion is rotation invariant") {
    const auto& mesh = hemisphere_fixture();
    auto rotated = hemisphere_map();
    const Eigen::Rotation2Dd rot(0.7);
    for (auto& p : rotated.uv) p = rot * p;
    const auto a = distortion_report(mesh, hemisphere_map());
    const auto b = distortion_report(mesh, rotated);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        CHECK(std::abs(a.dilatation[f] - b.dilatation[f]) <= 1e-12 * a.dilatation[f]);
        CHECK(std::abs(a.area_ratio[f] - b.area_ratio[f]) <= 1e-12 * a.area_ratio[f]);
    }
}

TEST_CASE("sample_back") {
    const auto& mesh = hemisphere_fixture();
    const auto& map = hemisphere_map();
    const DiskSampler sampler(map, mesh);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        CHECK((sampler.sample(map.uv[v]).position - mesh.vertices[v]).norm() < 1e-12);
    for (std::size_t f = 0; f < mesh.face_count(); f += 97) {
        const auto& t = mesh.faces[f];
        const Vec2 c = (map.uv[t[0]] + map.uv[t[1]] + map.uv[t[2]]) / 3.0;
        const Vec3 expected = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
        const auto p = sampler.sample(c);
        CHECK(p.face == f);
        CHECK((p.position - expected).norm() < 1e-12);
        for (double w : p.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sample_back(map, mesh, Vec2(2.0, 0.0)), DomainError);
}

TEST_CASE("disk map json round trip") {
    const auto back = parse_disk_map(format_disk_map(hemisphere_map()));
    CHECK(back.uv == hemisphere_map().uv);
    CHECK(back.boundary == hemisphere_map().boundary);
    CHECK(back.boundary_param == hemisphere_map().boundary_param);
    CHECK(back.source_mesh_id == hemisphere_map().source_mesh_id);
    CHECK_THROWS_AS(parse_disk_map("{\"uv\": 3}"), ParseError);
}

}
