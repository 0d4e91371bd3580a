#include <algorithm>
#include <cmath>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/parallel.hpp"
#include "cortex_atlas/simd/kernels.hpp"

namespace cortex {

namespace {

// Centered sum of squares this small relative to the series magnitude means
// the series is constant up to rounding.
constexpr double kFlatRelative = 1e-28;

bool is_flat(double centered_squares, double mean, std::size_t samples) {
    return centered_squares <= kFlatRelative * static_cast<double>(samples) * mean * mean ||
           centered_squares == 0.0;
}

void check_samples(const TimeSeriesField& ts) {
    if (ts.samples < 3) throw DomainError("need at least 3 time samples (got " + std::to_string(ts.samples) + ")");
}

}  // namespace

OverlayField seed_correlation(const TimeSeriesField& ts, const Seed& seed, const std::vector<int>& labels) {
    check_samples(ts);
    const std::size_t t = ts.samples;
    std::vector<double> seed_series(t, 0.0);
    if (seed.kind == Seed::Kind::vertex) {
        if (seed.id < 0 || static_cast<std::size_t>(seed.id) >= ts.vertices)
            throw DomainError("seed vertex " + std::to_string(seed.id) + " out of range");
        std::copy_n(ts.series(static_cast<std::size_t>(seed.id)), t, seed_series.begin());
    } else {
        if (labels.size() != ts.vertices) throw DomainError("region seed needs one label per time-series vertex");
        std::size_t members = 0;
        for (std::size_t v = 0; v < ts.vertices; ++v) {
            if (labels[v] != seed.id) continue;
            const double* x = ts.series(v);
            for (std::size_t i = 0; i < t; ++i) seed_series[i] += x[i];
            ++members;
        }
        if (members == 0) throw DomainError("seed region " + std::to_string(seed.id) + " has no vertices");
        for (double& x : seed_series) x /= static_cast<double>(members);
    }

    const double seed_mean = simd::sum(seed_series.data(), t) / static_cast<double>(t);
    std::vector<double> centered(t);
    for (std::size_t i = 0; i < t; ++i) centered[i] = seed_series[i] - seed_mean;
    const double seed_squares = simd::centered_moments(seed_series.data(), centered.data(), t, seed_mean).squares;
    const bool seed_flat = is_flat(seed_squares, seed_mean, t);

    OverlayField out;
    out.name = seed.kind == Seed::Kind::vertex ? "correlation_vertex_" + std::to_string(seed.id)
                                               : "correlation_region_" + std::to_string(seed.id);
    out.values.assign(ts.vertices, 0.0);
    out.range_min = -1.0;
    out.range_max = 1.0;
    out.colormap = Colormap::diverging;
    std::vector<char> flat(ts.vertices, 0);
    parallel_for(ts.vertices, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const double* x = ts.series(v);
            const double mean = simd::sum(x, t) / static_cast<double>(t);
            const auto m = simd::centered_moments(x, centered.data(), t, mean);
            if (seed_flat || is_flat(m.squares, mean, t)) {
                flat[v] = 1;
                continue;
            }
            out.values[v] = std::clamp(m.cross / std::sqrt(m.squares * seed_squares), -1.0, 1.0);
        }
    });
    for (std::size_t v = 0; v < ts.vertices; ++v)
        if (flat[v]) out.flagged.push_back(static_cast<int>(v));
    return out;
}

TimeSeriesField regress_mean_gray(const TimeSeriesField& ts, Warnings* warnings) {
    check_samples(ts);
    if (ts.vertices == 0) return ts;
    const std::size_t t = ts.samples;
    std::vector<double> g(t, 0.0);
    for (std::size_t v = 0; v < ts.vertices; ++v) {
        const double* x = ts.series(v);
        for (std::size_t i = 0; i < t; ++i) g[i] += x[i];
    }
    for (double& x : g) x /= static_cast<double>(ts.vertices);
    const double g_mean = simd::sum(g.data(), t) / static_cast<double>(t);
    std::vector<double> gc(t);
    for (std::size_t i = 0; i < t; ++i) gc[i] = g[i] - g_mean;
    const double g_squares = simd::centered_moments(g.data(), gc.data(), t, g_mean).squares;

    std::vector<double> means(ts.vertices), spread(ts.vertices);
    double mean_spread = 0.0;
    for (std::size_t v = 0; v < ts.vertices; ++v) {
        const double* x = ts.series(v);
        means[v] = simd::sum(x, t) / static_cast<double>(t);
        spread[v] = simd::centered_moments(x, gc.data(), t, means[v]).squares;
        mean_spread += spread[v] / static_cast<double>(ts.vertices);
    }
    // g is flat relative to the data when its variance is negligible next to
    // the typical vertex variance.
    const bool g_flat = g_squares <= 1e-20 * mean_spread || g_squares == 0.0;
    if (g_flat) warn(warnings, "mean gray timecourse has zero variance; only the per-vertex mean was removed");

    TimeSeriesField out = ts;
    parallel_for(ts.vertices, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const double* x = ts.series(v);
            double* r = out.series(v);
            const double beta =
                g_flat ? 0.0 : simd::centered_moments(x, gc.data(), t, means[v]).cross / g_squares;
            for (std::size_t i = 0; i < t; ++i) r[i] = (x[i] - means[v]) - beta * gc[i];
        }
    });
    return out;
}

}  // namespace cortex
