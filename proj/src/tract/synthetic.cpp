#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cortex_atlas/tract.hpp"
#include "../util/rng.hpp"

namespace cortex::synth {

using detail::Rng;

StreamlineSet streamlines(const TriMesh& mesh, const StreamlineOptions& o) {
    Rng rng(o.seed);
    Vec3 center = Vec3::Zero();
    for (const auto& v : mesh.vertices) center += v;
    center /= static_cast<double>(mesh.vertex_count());

    struct Template {
        Vec3 a, b, control;
    };
    std::vector<Template> templates;
    for (std::size_t t = 0; t < std::max<std::size_t>(o.bundles, 1); ++t) {
        const Vec3 a = mesh.vertices[rng.index(mesh.vertex_count())];
        const Vec3 b = mesh.vertices[rng.index(mesh.vertex_count())];
        const Vec3 mid = 0.5 * (a + b);
        templates.push_back({a, b, mid + 0.5 * (center - mid) + rng.normal3(5.0)});
    }

    StreamlineSet set;
    set.streamlines.reserve(o.count);
    for (std::size_t s = 0; s < o.count; ++s) {
        const double roll = rng.uniform();
        if (roll < o.degenerate_fraction) {
            const Vec3 p = mesh.vertices[rng.index(mesh.vertex_count())];
            set.streamlines.push_back({p, p});
            continue;
        }
        const auto& t = templates[rng.index(templates.size())];
        Vec3 a = t.a + rng.normal3(o.jitter_mm);
        Vec3 b = t.b + rng.normal3(o.jitter_mm);
        if (roll < o.degenerate_fraction + o.stray_fraction) b = center + rng.normal3(3.0);
        const Vec3 control = t.control + rng.normal3(2.0 * o.jitter_mm);
        const int points = 20 + static_cast<int>(rng.index(21));
        Polyline line;
        line.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            const double u = static_cast<double>(i) / (points - 1);
            line.push_back((1 - u) * (1 - u) * a + 2 * (1 - u) * u * control + u * u * b + rng.normal3(0.2));
        }
        line.front() = a;
        line.back() = b;
        if (rng.uniform() < 0.5) std::reverse(line.begin(), line.end());
        set.streamlines.push_back(std::move(line));
    }
    return set;
}

}  // namespace cortex::synth
