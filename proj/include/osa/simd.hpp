#pragma once

#include <cstddef>
#include <cstdint>

// Dense/sparse vector kernels used by the measure-evolution hot loop.
// A scalar reference implementation always exists; on x86 an AVX2+FMA
// variant is selected at runtime when the CPU supports it.  The active
// backend can be forced programmatically or with OSA_SIMD=scalar|avx2.
namespace osa::simd {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char* backend_name(Backend b);

// Returns false (and leaves the backend unchanged) if b is not available
// on this machine or in this build.
bool set_backend(Backend b);
bool backend_available(Backend b);

double dot(const double* a, const double* b, std::size_t n);
void add_inplace(double* acc, const double* x, std::size_t n);
void scale(double* x, double s, std::size_t n);

// y = A x for a CSR matrix with int32 indices.  Rows are independent, so
// any backend produces the same left-to-right per-row summation order.
void spmv(const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
          std::size_t n_rows, const double* x, double* y);

namespace detail {

struct Kernels {
    double (*dot)(const double*, const double*, std::size_t);
    void (*add_inplace)(double*, const double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
    void (*spmv)(const std::int32_t*, const std::int32_t*, const double*, std::size_t,
                 const double*, double*);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels(); // nullptr when not compiled in

} // namespace detail

} // namespace osa::simd
