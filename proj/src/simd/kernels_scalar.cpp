#include "osa/simd.hpp"

namespace osa::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void add_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void scale_scalar(double* x, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void spmv_scalar(const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
                 std::size_t n_rows, const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double acc = 0.0;
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[cols[k]];
        y[r] = acc;
    }
}

} // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{dot_scalar, add_scalar, scale_scalar, spmv_scalar};
    return k;
}

} // namespace osa::simd::detail
