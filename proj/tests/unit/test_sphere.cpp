#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/sphere_map.hpp"

using namespace cortex;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const DiskMap& left_map() {
    static const DiskMap map = harmonic_disk_map(synth::hemisphere(14));
    return map;
}

DiskMap rotated(const DiskMap& map, double angle) {
    DiskMap out = map;
    const Eigen::Rotation2Dd rot(angle);
    for (auto& p : out.uv) p = rot * p;
    return out;
}

// Dilatation of the differential at uv by central differences.
double dilatation_at(const Vec2& uv, Cap cap) {
    const double h = 1e-6;
    Eigen::Matrix<double, 3, 2> J;
    J.col(0) = (inverse_stereographic(uv + Vec2(h, 0), cap) - inverse_stereographic(uv - Vec2(h, 0), cap)) / (2 * h);
    J.col(1) = (inverse_stereographic(uv + Vec2(0, h), cap) - inverse_stereographic(uv - Vec2(0, h), cap)) / (2 * h);
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
    return svd.singularValues()(0) / svd.singularValues()(1);
}

}  // namespace

TEST_SUITE("sphere") {

TEST_CASE("closed-form points") {
    const Vec3 pole = inverse_stereographic(Vec2(0, 0), Cap::lower);
    CHECK((pole - Vec3(0, 0, -1)).norm() == 0.0);
    CHECK((inverse_stereographic(Vec2(1, 0), Cap::lower) - Vec3(1, 0, 0)).norm() < 1e-15);
    CHECK((inverse_stereographic(Vec2(0.5, 0), Cap::lower) - Vec3(0.8, 0, -0.6)).norm() < 1e-15);
    CHECK((inverse_stereographic(Vec2(0.5, 0), Cap::upper) - Vec3(0.8, 0, 0.6)).norm() < 1e-15);
}

TEST_CASE("forward after inverse is the identity on the disk") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double r = std::sqrt(u(rng)), a = 2 * std::numbers::pi * u(rng);
        const Vec2 p(r * std::cos(a), r * std::sin(a));
        for (Cap cap : {Cap::lower, Cap::upper}) {
            const Vec3 x = inverse_stereographic(p, cap);
            CHECK(std::abs(x.norm() - 1.0) < 1e-15);
            CHECK((stereographic(x, cap) - p).norm() < 1e-12);
        }
    }
}

TEST_CASE("inverse stereographic is conformal") {
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const Vec2 p(-1.0 + 0.1 * i, -1.0 + 0.1 * j);
            if (p.norm() > 1.0) continue;
            CHECK(std::abs(dilatation_at(p, Cap::lower) - 1.0) < 1e-6);
            CHECK(std::abs(dilatation_at(p, Cap::upper) - 1.0) < 1e-6);
        }
}

TEST_CASE("disk boundary lands on the equator") {
    const auto s = inverse_stereographic(left_map(), Cap::upper);
    for (int b : left_map().boundary) CHECK(s.xyz[b].z() == 0.0);
    CHECK(s.upper_boundary == left_map().boundary);
    CHECK(s.lower_count == 0);
}

TEST_CASE("recovers a 17 degree pre-rotation") {
    const auto lower = inverse_stereographic(left_map(), Cap::lower);
    const auto upper = inverse_stereographic(rotated(left_map(), 17 * kDeg), Cap::upper);
    const auto a = align_hemispheres(lower, upper, 256);
    CHECK(std::abs(a.rotation + 17 * kDeg) < 1e-6);
    CHECK(a.rms < 1e-9);
    CHECK_FALSE(a.reflected);
    CHECK(a.combined.lower_count == lower.xyz.size());
    CHECK(a.combined.xyz.size() == 2 * lower.xyz.size());
    // Seam vertices meet their mirror images.
    for (std::size_t i = 0; i < a.combined.lower_boundary.size(); ++i) {
        const int v = a.combined.lower_boundary[i];
        const Vec3 up = a.combined.xyz[v + a.combined.lower_count];
        CHECK((up - a.combined.xyz[v]).norm() < 1e-6);
    }
    for (const auto& [v, p] : a.combined.seam) CHECK((p - a.combined.xyz[v]).norm() < 1e-6);
}

TEST_CASE("identical seams give the identity") {
    const auto lower = inverse_stereographic(left_map(), Cap::lower);
    const auto upper = inverse_stereographic(left_map(), Cap::upper);
    const auto a = align_hemispheres(lower, upper, 64);
    CHECK(std::abs(a.rotation) < 1e-12);
    CHECK(a.rms < 1e-12);
    CHECK(a.offset == 0);
    CHECK_FALSE(a.reflected);
}

TEST_CASE("a single sample is matched exactly") {
    const auto lower = inverse_stereographic(left_map(), Cap::lower);
    const auto upper = inverse_stereographic(rotated(left_map(), 1.0), Cap::upper);
    const auto a = align_hemispheres(lower, upper, 1);
    CHECK(a.rms < 1e-15);
    CHECK(std::abs(a.rotation + 1.0) < 1e-12);
    CHECK_THROWS_AS(align_hemispheres(lower, upper, 0), DomainError);
}

TEST_CASE("pre-rotating both hemispheres leaves the objective alone") {
    const auto base = align_hemispheres(inverse_stereographic(left_map(), Cap::lower),
                                        inverse_stereographic(rotated(left_map(), 17 * kDeg), Cap::upper), 128);
    for (double extra : {0.4, -2.0, 3.0}) {
        const auto a = align_hemispheres(inverse_stereographic(rotated(left_map(), extra), Cap::lower),
                                         inverse_stereographic(rotated(left_map(), extra + 17 * kDeg), Cap::upper), 128);
        CHECK(std::abs(a.rms - base.rms) < 1e-9);
        CHECK(std::abs(std::remainder(a.rotation - base.rotation, 2 * std::numbers::pi)) < 1e-6);
    }
}

TEST_CASE("a reflected seam is detected") {
    // Mirror the upper disk through the x axis and give it an irregular
    // boundary so no plain rotation fits.
    auto disk = left_map();
    for (std::size_t k = 0; k < disk.boundary.size(); ++k) {
        const double t = disk.boundary_param[k] + 0.2 * std::sin(disk.boundary_param[k]) * std::sin(disk.boundary_param[k]);
        disk.uv[disk.boundary[k]] = Vec2(std::cos(t), std::sin(t));
    }
    auto mirror = disk;
    for (auto& p : mirror.uv) p.y() = -p.y();
    std::reverse(mirror.boundary.begin() + 1, mirror.boundary.end());
    const auto a = align_hemispheres(inverse_stereographic(disk, Cap::lower), inverse_stereographic(mirror, Cap::upper), 200);
    CHECK(a.reflected);
    CHECK(a.rms < 1e-9);
}

TEST_CASE("exploded view") {
    auto mesh = synth::ring_sphere(24, 3.0);
    SphereMap sphere;
    sphere.xyz = mesh.vertices;
    sphere.radius = 3.0;
    std::vector<int> regions;
    RegionTable table;
    table[1] = Region{"north", {}, 0, Hemisphere::right};
    table[2] = Region{"south", {}, 0, Hemisphere::left};

    SUBCASE("antipodal caps drift apart by 2R") {
        SphereMap caps;
        caps.radius = 3.0;
        for (const auto& p : mesh.vertices)
            if (std::abs(p.z()) > 1.5) {
                caps.xyz.push_back(p);
                regions.push_back(p.z() > 0 ? 1 : 2);
            }
        const auto e = exploded_view(caps, regions, table, 2.0);
        CHECK((e.offsets.at(1) - Vec3(0, 0, 3.0)).norm() < 1e-9);
        CHECK((e.offsets.at(2) - Vec3(0, 0, -3.0)).norm() < 1e-9);
        double top_min = INFINITY, bottom_max = -INFINITY, top0 = INFINITY, bottom0 = -INFINITY;
        for (std::size_t v = 0; v < caps.xyz.size(); ++v) {
            if (regions[v] == 1) top_min = std::min(top_min, e.positions[v].z()), top0 = std::min(top0, caps.xyz[v].z());
            else bottom_max = std::max(bottom_max, e.positions[v].z()), bottom0 = std::max(bottom0, caps.xyz[v].z());
        }
        CHECK((top_min - bottom_max) - (top0 - bottom0) == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("s = 1 and rigidity") {
        table[3] = Region{"east", {}, 0, Hemisphere::right};
        // The equatorial band alone has no mean direction, so it is split in two.
        for (const auto& p : mesh.vertices) regions.push_back(p.z() > 1.0 ? 1 : (p.z() < -1.0 ? 2 : (p.x() > 0 ? 3 : 4)));
        table[4] = Region{"west", {}, 0, Hemisphere::left};
        const auto same = exploded_view(sphere, regions, table, 1.0);
        CHECK(same.positions == sphere.xyz);
        for (double s : {1.3, 2.0, 7.5}) {
            const auto e = exploded_view(sphere, regions, table, s, {{1, Vec3(0, 0, 3)}, {-1, Vec3(1, 1, 1)}});
            for (std::size_t a = 0; a < regions.size(); a += 7)
                for (std::size_t b = a + 1; b < regions.size(); b += 11) {
                    if (regions[a] != regions[b]) continue;
                    const double d0 = (sphere.xyz[a] - sphere.xyz[b]).norm();
                    const double d1 = (e.positions[a] - e.positions[b]).norm();
                    CHECK(std::abs(d0 - d1) < 1e-9);
                }
            CHECK((e.endpoints[0] - Vec3(0, 0, 3) - e.offsets.at(1)).norm() < 1e-12);
            CHECK(e.endpoints[1] == Vec3(1, 1, 1));
        }
        CHECK_THROWS_AS(exploded_view(sphere, regions, table, 0.5), DomainError);
    }
    SUBCASE("single region over the whole sphere is a pure translation") {
        regions.assign(sphere.xyz.size(), 1);
        // Break the symmetry so the mean direction is well defined.
        sphere.xyz.push_back(Vec3(0, 0, 3));
        regions.push_back(1);
        const auto e = exploded_view(sphere, regions, table, 2.0);
        const Vec3 shift = e.positions[0] - sphere.xyz[0];
        for (std::size_t v = 0; v < sphere.xyz.size(); ++v) CHECK((e.positions[v] - sphere.xyz[v] - shift).norm() < 1e-12);
        CHECK(shift.norm() == doctest::Approx(3.0).epsilon(1e-12));
    }
}

}
