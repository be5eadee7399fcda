// Compiled with -mavx2 -mfma on x86 targets only; see src/CMakeLists.txt.
#include "osa/simd.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace osa::simd::detail {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void add_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) acc[i] += x[i];
}

void scale_avx2(double* x, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
    for (; i < n; ++i) x[i] *= s;
}

void spmv_avx2(const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
               std::size_t n_rows, const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::int32_t begin = row_ptr[r];
        const std::int32_t end = row_ptr[r + 1];
        __m256d vacc = _mm256_setzero_pd();
        std::int32_t k = begin;
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d gathered = _mm256_i32gather_pd(x, idx, 8);
            vacc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), gathered, vacc);
        }
        double acc = hsum(vacc);
        for (; k < end; ++k) acc += vals[k] * x[cols[k]];
        y[r] = acc;
    }
}

} // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{dot_avx2, add_avx2, scale_avx2, spmv_avx2};
    return &k;
}

} // namespace osa::simd::detail

#else

namespace osa::simd::detail {

const Kernels* avx2_kernels() { return nullptr; }

} // namespace osa::simd::detail

#endif
