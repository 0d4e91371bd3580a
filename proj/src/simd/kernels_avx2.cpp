#include "cortex_atlas/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace cortex::simd::avx2 {

namespace {

inline double reduce(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// Coordinate `axis` of four points; lanes past `count` read index 0 so the
// caller can zero their contribution.
inline __m256d gather_axis(const double* pts, const std::size_t (&idx)[4], int axis) {
    return _mm256_set_pd(pts[3 * idx[3] + axis], pts[3 * idx[2] + axis], pts[3 * idx[1] + axis],
                         pts[3 * idx[0] + axis]);
}

inline __m256d distances(const double* a, const std::size_t (&ia)[4], const double* b,
                         const std::size_t (&ib)[4]) {
    const __m256d dx = _mm256_sub_pd(gather_axis(a, ia, 0), gather_axis(b, ib, 0));
    const __m256d dy = _mm256_sub_pd(gather_axis(a, ia, 1), gather_axis(b, ib, 1));
    const __m256d dz = _mm256_sub_pd(gather_axis(a, ia, 2), gather_axis(b, ib, 2));
    const __m256d sq = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    return _mm256_sqrt_pd(sq);
}

}  // namespace

MdfSums mdf_sums(const double* a, const double* b, std::size_t k) {
    __m256d direct = _mm256_setzero_pd();
    __m256d flipped = _mm256_setzero_pd();
    for (std::size_t i0 = 0; i0 < k; i0 += 4) {
        std::size_t ia[4], ib[4], ibf[4];
        double keep[4];
        for (int l = 0; l < 4; ++l) {
            const std::size_t i = i0 + static_cast<std::size_t>(l);
            const bool live = i < k;
            ia[l] = live ? i : 0;
            ib[l] = live ? i : 0;
            ibf[l] = live ? k - 1 - i : 0;
            keep[l] = live ? 1.0 : 0.0;
        }
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(keep), _mm256_set1_pd(0.5), _CMP_GT_OQ);
        direct = _mm256_add_pd(direct, _mm256_and_pd(mask, distances(a, ia, b, ib)));
        flipped = _mm256_add_pd(flipped, _mm256_and_pd(mask, distances(a, ia, b, ibf)));
    }
    return {reduce(direct), reduce(flipped)};
}

NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz) {
    const __m256d vx = _mm256_set1_pd(qx);
    const __m256d vy = _mm256_set1_pd(qy);
    const __m256d vz = _mm256_set1_pd(qz);
    __m256d best = _mm256_set1_pd(INFINITY);
    __m256d best_idx = _mm256_set1_pd(0.0);
    __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d step = _mm256_set1_pd(4.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vz);
        const __m256d d = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                        _mm256_mul_pd(dz, dz));
        const __m256d better = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, d, better);
        best_idx = _mm256_blendv_pd(best_idx, idx, better);
        idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double lane_best[4];
    alignas(32) double lane_idx[4];
    _mm256_store_pd(lane_best, best);
    _mm256_store_pd(lane_idx, best_idx);
    NearestPoint result{0, INFINITY};
    for (int l = 0; l < 4; ++l) {
        const auto li = static_cast<std::size_t>(lane_idx[l]);
        if (lane_best[l] < result.squared_distance ||
            (lane_best[l] == result.squared_distance && li < result.index)) {
            result = {li, lane_best[l]};
        }
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        const double dz = zs[i] - qz;
        const double d = (dx * dx + dy * dy) + dz * dz;
        if (d < result.squared_distance) result = {i, d};
    }
    return result;
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < n; ++i) lanes[i & 3u] += x[i];
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean) {
    const __m256d m = _mm256_set1_pd(mean);
    __m256d cross = _mm256_setzero_pd();
    __m256d squares = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d c = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
        cross = _mm256_add_pd(cross, _mm256_mul_pd(c, _mm256_loadu_pd(y + i)));
        squares = _mm256_add_pd(squares, _mm256_mul_pd(c, c));
    }
    alignas(32) double lc[4];
    alignas(32) double ls[4];
    _mm256_store_pd(lc, cross);
    _mm256_store_pd(ls, squares);
    for (; i < n; ++i) {
        const double c = x[i] - mean;
        lc[i & 3u] += c * y[i];
        ls[i & 3u] += c * c;
    }
    return {(lc[0] + lc[1]) + (lc[2] + lc[3]), (ls[0] + ls[1]) + (ls[2] + ls[3])};
}

}  // namespace cortex::simd::avx2
