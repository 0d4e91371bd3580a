#include "cortex_atlas/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace cortex::simd {

namespace {

struct KernelTable {
    Isa isa;
    MdfSums (*mdf_sums)(const double*, const double*, std::size_t);
    NearestPoint (*nearest_point)(const double*, const double*, const double*, std::size_t, double,
                                  double, double);
    double (*sum)(const double*, std::size_t);
    CenteredMoments (*centered_moments)(const double*, const double*, std::size_t, double);
};

KernelTable select_table() {
    const char* forced = std::getenv("CORTEX_ATLAS_SIMD");
    const bool force_scalar = forced && std::string(forced) == "scalar";
#if defined(CORTEX_HAVE_AVX2_KERNELS)
    if (!force_scalar && avx2_available()) {
        return {Isa::avx2, avx2::mdf_sums, avx2::nearest_point, avx2::sum, avx2::centered_moments};
    }
#endif
    (void)force_scalar;
    return {Isa::scalar, scalar::mdf_sums, scalar::nearest_point, scalar::sum,
            scalar::centered_moments};
}

const KernelTable& table() {
    static const KernelTable t = select_table();
    return t;
}

}  // namespace

bool avx2_available() {
#if defined(CORTEX_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

MdfSums mdf_sums(const double* a, const double* b, std::size_t k) { return table().mdf_sums(a, b, k); }

NearestPoint nearest_point(const double* xs, const double* ys, const double* zs, std::size_t n,
                           double qx, double qy, double qz) {
    return table().nearest_point(xs, ys, zs, n, qx, qy, qz);
}

double sum(const double* x, std::size_t n) { return table().sum(x, n); }

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean) {
    return table().centered_moments(x, y, n, mean);
}

}  // namespace cortex::simd
