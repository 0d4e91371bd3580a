#include "cortex_atlas/simd/kernels.hpp"

#include <cmath>

namespace cortex::simd::scalar {

namespace {

inline double point_distance(const double* p, const double* q) {
    const double dx = p[0] - q[0];
    const double dy = p[1] - q[1];
    const double dz = p[2] - q[2];
    return std::sqrt((dx * dx + dy * dy) + dz * dz);
}

inline double reduce(const double (&lanes)[4]) { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }

}  // namespace

MdfSums mdf_sums(const double* a, const double* b, std::size_t k) {
    double direct[4] = {0.0, 0.0, 0.0, 0.0};
    double flipped[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t lane = i & 3u;
        direct[lane] += point_distance(a + 3 * i, b + 3 * i);
        flipped[lane] += point_distance(a + 3 * i, b + 3 * (k - 1 - i));
    }
    return {reduce(direct), reduce(flipped)};
}

NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz) {
    NearestPoint best{0, INFINITY};
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        const double dz = zs[i] - qz;
        const double d = (dx * dx + dy * dy) + dz * dz;
        if (d < best.squared_distance) best = {i, d};
    }
    return best;
}

double sum(const double* x, std::size_t n) {
    double lanes[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lanes[i & 3u] += x[i];
    return reduce(lanes);
}

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean) {
    double cross[4] = {0.0, 0.0, 0.0, 0.0};
    double squares[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double c = x[i] - mean;
        cross[i & 3u] += c * y[i];
        squares[i & 3u] += c * c;
    }
    return {reduce(cross), reduce(squares)};
}

}  // namespace cortex::simd::scalar
