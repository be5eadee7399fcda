#pragma once

#include "osa/rng.hpp"
#include "osa/system.hpp"

#include <cstdint>
#include <vector>

namespace osa {

struct RunConfig {
    std::uint64_t num_bits = 320;
    std::uint64_t num_runs = 2000;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    double xhat0 = 0.0;
    bool keep_traces = false;
    unsigned num_threads = 0; // 0 = hardware concurrency

    void validate() const;
};

struct TrialResult {
    std::uint64_t bit_errors = 0;
    // Retained only when cfg.keep_traces is set.
    std::vector<std::uint8_t> error_trace; // error_trace[k] = (uhat_k != u_k)
    std::vector<double> d_trace;           // d_trace[k] = xhat_k - x_k, k = 0..K
};

struct MseEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std of per-run error rates / sqrt(num_runs)
    std::uint64_t num_runs = 0;
    std::uint64_t num_bits = 0;
};

// K iid Bernoulli(1/2) bits from the supplied generator.
std::vector<std::uint8_t> generate_input(Rng& rng, std::uint64_t num_bits);

inline double evolve_state(const DiscreteSystem& sys, double x_prev, int u_prev) {
    return sys.q * x_prev + sys.w * u_prev;
}

inline double observe(const DiscreteSystem& sys, double x, Rng& rng) {
    return sys.c * x + sys.sigma * rng.normal();
}

struct OsaStep {
    int uhat;
    double xhat;
};

// One decoder step: threshold y against the midpoint of the two
// predicted noiseless outputs, ties decoding to 0, then advance the
// state estimate with the decoded bit.
inline OsaStep osa_step(const DiscreteSystem& sys, double xhat_prev, double y) {
    const double threshold = sys.c * (sys.q * xhat_prev + 0.5 * sys.w);
    const int uhat = (sys.c > 0.0) ? (y > threshold) : (y < threshold);
    return {uhat, sys.q * xhat_prev + sys.w * uhat};
}

// Simulates one K-bit transmission and decodes it online.
TrialResult run_trial(const DiscreteSystem& sys, const RunConfig& cfg, Rng& rng);

// Mean and standard error of per-run bit error rates over num_runs
// independent trials.  Trial i uses Rng(cfg.seed, i), so the estimate
// does not depend on execution order or thread count.
MseEstimate monte_carlo_mse(const DiscreteSystem& sys, const RunConfig& cfg);

struct SnrPoint {
    double snr_db;
    MseEstimate estimate;
};

// Runs monte_carlo_mse at each SNR with sigma set via sigma_for_snr.
// All points reuse the same trial streams, so curves at different SNR
// are positively coupled (common random numbers).
std::vector<SnrPoint> sweep_snr(const DiscreteSystem& sys_base,
                                const std::vector<double>& snr_db_list, const RunConfig& cfg);

} // namespace osa
