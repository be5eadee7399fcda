#include "osa/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace osa::simd {

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const detail::Kernels* kernels_for(Backend b) {
    switch (b) {
    case Backend::Avx2:
        return cpu_has_avx2_fma() ? detail::avx2_kernels() : nullptr;
    case Backend::Scalar:
    default:
        return &detail::scalar_kernels();
    }
}

struct ActiveState {
    std::atomic<const detail::Kernels*> kernels;
    std::atomic<Backend> backend;
};

ActiveState& active_state() {
    static ActiveState state = [] {
        Backend pick = kernels_for(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
        if (const char* env = std::getenv("OSA_SIMD")) {
            if (std::strcmp(env, "scalar") == 0) pick = Backend::Scalar;
            else if (std::strcmp(env, "avx2") == 0 && kernels_for(Backend::Avx2))
                pick = Backend::Avx2;
        }
        return ActiveState{{kernels_for(pick)}, {pick}};
    }();
    return state;
}

} // namespace

Backend active_backend() { return active_state().backend.load(); }

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::Avx2: return "avx2";
    case Backend::Scalar:
    default: return "scalar";
    }
}

bool backend_available(Backend b) { return kernels_for(b) != nullptr; }

bool set_backend(Backend b) {
    const detail::Kernels* k = kernels_for(b);
    if (!k) return false;
    active_state().kernels.store(k);
    active_state().backend.store(b);
    return true;
}

double dot(const double* a, const double* b, std::size_t n) {
    return active_state().kernels.load()->dot(a, b, n);
}

void add_inplace(double* acc, const double* x, std::size_t n) {
    active_state().kernels.load()->add_inplace(acc, x, n);
}

void scale(double* x, double s, std::size_t n) {
    active_state().kernels.load()->scale(x, s, n);
}

void spmv(const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
          std::size_t n_rows, const double* x, double* y) {
    active_state().kernels.load()->spmv(row_ptr, cols, vals, n_rows, x, y);
}

} // namespace osa::simd
