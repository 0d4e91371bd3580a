#include <algorithm>
#include <cmath>
#include <numbers>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"

namespace cortex {

namespace {

// Singular values of a 2x2 matrix [[a, b], [c, d]] in closed form.
std::pair<double, double> singular_values(double a, double b, double c, double d) {
    const double e = 0.5 * (a + d), f = 0.5 * (a - d);
    const double g = 0.5 * (c + b), h = 0.5 * (c - b);
    const double q = std::hypot(e, h), r = std::hypot(f, g);
    return {q + r, std::fabs(q - r)};
}

}  // namespace

DistortionReport distortion_report(const TriMesh& mesh, const DiskMap& map) {
    if (map.uv.size() != mesh.vertex_count()) throw DomainError("disk map does not match mesh vertex count");
    const auto a3 = face_areas(mesh);
    double total = 0.0;
    for (double a : a3) total += a;

    DistortionReport report;
    report.area_ratio.resize(mesh.face_count());
    report.dilatation.resize(mesh.face_count());
    double log_sq = 0.0, k_sum = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        const double a2 = signed_area(map.uv, t);
        if (!(a2 > 0.0)) throw NumericError("face " + std::to_string(f) + " is degenerate or flipped in 2D");
        report.area_ratio[f] = a2 / (a3[f] / total * std::numbers::pi);

        // Face in its own orthonormal 2D frame: q0 = 0, q1 = (l, 0), q2 = (x2, y2).
        const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
        const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
        const double l = e1.norm();
        const Vec3 x_axis = e1 / l;
        const double x2 = e2.dot(x_axis);
        const double y2 = (e2 - x2 * x_axis).norm();
        const Vec2 du1 = map.uv[t[1]] - map.uv[t[0]];
        const Vec2 du2 = map.uv[t[2]] - map.uv[t[0]];
        // J * [[l, x2], [0, y2]] = [du1, du2]
        const double j00 = du1.x() / l, j10 = du1.y() / l;
        const double j01 = (du2.x() - j00 * x2) / y2, j11 = (du2.y() - j10 * x2) / y2;
        const auto [s1, s2] = singular_values(j00, j01, j10, j11);
        const double k = s1 / s2;
        report.dilatation[f] = k;
        log_sq += std::log(report.area_ratio[f]) * std::log(report.area_ratio[f]);
        k_sum += k;
        report.max_dilatation = std::max(report.max_dilatation, k);
    }
    const double nf = static_cast<double>(mesh.face_count());
    report.rms_log_area_ratio = std::sqrt(log_sq / nf);
    report.mean_dilatation = k_sum / nf;
    return report;
}

}  // namespace cortex
