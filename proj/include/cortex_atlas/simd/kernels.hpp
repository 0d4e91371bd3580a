#pragma once

// Data-parallel inner loops shared by clustering, endpoint lookup and the
// functional overlays. Each kernel has a scalar reference and, on x86-64, an
// AVX2 variant. Both variants accumulate in four interleaved lanes and reduce
// as (l0 + l1) + (l2 + l3), so they agree bit for bit; the equivalence tests
// rely on that.

#include <cstddef>
#include <string_view>

namespace cortex::simd {

enum class Isa { scalar, avx2 };

struct MdfSums {
    double direct;   // sum_i |a_i - b_i|
    double flipped;  // sum_i |a_i - b_{k-1-i}|
};

struct NearestPoint {
    std::size_t index;
    double squared_distance;
};

struct CenteredMoments {
    double cross;    // sum_i (x_i - mean) * y_i
    double squares;  // sum_i (x_i - mean)^2
};

namespace scalar {
MdfSums mdf_sums(const double* a, const double* b, std::size_t k);
NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz);
double sum(const double* x, std::size_t n);
CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean);
}  // namespace scalar

#if defined(CORTEX_HAVE_AVX2_KERNELS)
namespace avx2 {
MdfSums mdf_sums(const double* a, const double* b, std::size_t k);
NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz);
double sum(const double* x, std::size_t n);
CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean);
}  // namespace avx2
#endif

/// True when the AVX2 kernels are compiled in and the CPU supports them.
bool avx2_available();

/// ISA used by the dispatched entry points below. Chosen once: AVX2 when
/// available unless CORTEX_ATLAS_SIMD=scalar is set.
Isa active_isa();
std::string_view isa_name(Isa isa);

// Dispatched entry points. `a`/`b` hold k interleaved xyz points; nearest
// point returns the smallest index among equal squared distances and
// requires n >= 1.
MdfSums mdf_sums(const double* a, const double* b, std::size_t k);
NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz);
double sum(const double* x, std::size_t n);
CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean);

}  // namespace cortex::simd
