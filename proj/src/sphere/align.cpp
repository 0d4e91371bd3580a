#include <algorithm>
#include <cmath>
#include <numbers>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/sphere_map.hpp"

namespace cortex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTolerance = 1e-12;

double wrap(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

// Closed polyline through the seam points with cumulative chord lengths.
struct Seam {
    std::vector<Vec3> points;
    std::vector<double> cumulative;  // size points + 1, last entry = length

    explicit Seam(std::vector<Vec3> pts) : points(std::move(pts)) {
        cumulative.assign(points.size() + 1, 0.0);
        for (std::size_t i = 0; i < points.size(); ++i)
            cumulative[i + 1] = cumulative[i] + (points[(i + 1) % points.size()] - points[i]).norm();
    }

    double length() const { return cumulative.back(); }

    // Point at fraction t in [0, 1) of the arc length.
    Vec3 at(double t) const {
        if (points.size() == 1 || length() == 0.0) return points.front();
        t -= std::floor(t);
        const double s = t * length();
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), s) - cumulative.begin());
        i = std::clamp<std::size_t>(i, 1, points.size()) - 1;
        const double seg = cumulative[i + 1] - cumulative[i];
        const double f = seg > 0 ? (s - cumulative[i]) / seg : 0.0;
        return (1.0 - f) * points[i] + f * points[(i + 1) % points.size()];
    }

    std::vector<double> sample_angles(int m) const {
        std::vector<double> out(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const Vec3 p = at(static_cast<double>(i) / m);
            out[static_cast<std::size_t>(i)] = std::atan2(p.y(), p.x());
        }
        return out;
    }
};

Vec3 transform(const Vec3& p, double rotation, bool reflect) {
    const double y = reflect ? -p.y() : p.y();
    const double c = std::cos(rotation), s = std::sin(rotation);
    return {c * p.x() - s * y, s * p.x() + c * y, p.z()};
}

double rms_at(const std::vector<double>& diffs, double alpha) {
    double acc = 0.0;
    for (double d : diffs) {
        const double r = wrap(d - alpha);
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(diffs.size()));
}

double golden_section(const std::vector<double>& diffs, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = rms_at(diffs, c), fd = rms_at(diffs, d);
    for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rms_at(diffs, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rms_at(diffs, d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<Vec3> loop_points(const SphereMap& map, const std::vector<int>& loop) {
    std::vector<Vec3> pts;
    pts.reserve(loop.size());
    for (int v : loop) pts.push_back(map.xyz.at(v));
    return pts;
}

}  // namespace

Alignment align_hemispheres(const SphereMap& lower, const SphereMap& upper, int samples) {
    if (samples < 1) throw DomainError("alignment needs at least one seam sample");
    if (lower.lower_boundary.empty() || upper.upper_boundary.empty())
        throw DomainError("hemisphere alignment needs a lower and an upper hemisphere with non-empty boundaries");

    const Seam lower_seam(loop_points(lower, lower.lower_boundary));
    const auto target = lower_seam.sample_angles(samples);

    // Plain and reflected versions of the upper seam, both traversed
    // counter-clockwise seen from +z.
    std::vector<Vec3> plain = loop_points(upper, upper.upper_boundary);
    std::vector<Vec3> mirrored;
    mirrored.reserve(plain.size());
    mirrored.push_back(transform(plain.front(), 0.0, true));
    for (std::size_t i = plain.size(); i-- > 1;) mirrored.push_back(transform(plain[i], 0.0, true));
    const Seam candidates[2] = {Seam(plain), Seam(mirrored)};

    Alignment best;
    best.rms = INFINITY;
    std::vector<double> best_diffs;
    const std::size_t m = static_cast<std::size_t>(samples);
    for (int reflect = 0; reflect < 2; ++reflect) {
        const auto source = candidates[reflect].sample_angles(samples);
        std::vector<double> diffs(m);
        for (std::size_t k = 0; k < m; ++k) {
            double sx = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                diffs[i] = wrap(target[i] - source[(i + k) % m]);
                sx += std::cos(diffs[i]);
                sy += std::sin(diffs[i]);
            }
            const double alpha = std::atan2(sy, sx);
            const double rms = rms_at(diffs, alpha);
            if (rms < best.rms - kTieTolerance) {
                best.rms = rms;
                best.rotation = alpha;
                best.reflected = reflect == 1;
                best.offset = static_cast<int>(k);
                best_diffs = diffs;
            }
        }
    }

    const double half_width = kPi / std::max(samples, 2);
    const double refined = golden_section(best_diffs, best.rotation - half_width, best.rotation + half_width);
    if (rms_at(best_diffs, refined) <= rms_at(best_diffs, best.rotation)) best.rotation = refined;
    best.rotation = wrap(best.rotation);
    best.rms = rms_at(best_diffs, best.rotation);

    SphereMap& out = best.combined;
    out.radius = lower.radius;
    out.lower_count = lower.xyz.size();
    out.xyz = lower.xyz;
    out.side.assign(lower.xyz.size(), Cap::lower);
    for (const auto& p : upper.xyz) out.xyz.push_back(transform(p, best.rotation, best.reflected));
    out.side.resize(out.xyz.size(), Cap::upper);
    out.lower_boundary = lower.lower_boundary;
    for (int v : upper.upper_boundary) out.upper_boundary.push_back(v + static_cast<int>(out.lower_count));

    // Seam correspondence: each lower boundary vertex meets the transformed
    // upper seam at the same arc-length fraction, shifted by the offset.
    const Seam& chosen = candidates[best.reflected ? 1 : 0];
    std::vector<Vec3> moved;
    for (const auto& p : chosen.points) moved.push_back(transform(p, best.rotation, false));
    const Seam upper_seam(std::move(moved));
    const double shift = static_cast<double>(best.offset) / samples;
    for (std::size_t i = 0; i < lower.lower_boundary.size(); ++i) {
        const double t = lower_seam.length() > 0 ? lower_seam.cumulative[i] / lower_seam.length() : 0.0;
        out.seam.emplace_back(lower.lower_boundary[i], upper_seam.at(t + shift));
    }
    return best;
}

}  // namespace cortex
