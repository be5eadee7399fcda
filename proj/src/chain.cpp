#include "osa/chain.hpp"

#include "osa/errors.hpp"

#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace osa {

void RunConfig::validate() const {
    if (num_bits < 1) throw Error(ErrorCode::InvalidParam, "run config: num_bits must be >= 1");
    if (num_runs < 1) throw Error(ErrorCode::InvalidParam, "run config: num_runs must be >= 1");
    if (!std::isfinite(x0) || !std::isfinite(xhat0))
        throw Error(ErrorCode::InvalidParam, "run config: x0 and xhat0 must be finite");
}

std::vector<std::uint8_t> generate_input(Rng& rng, std::uint64_t num_bits) {
    std::vector<std::uint8_t> bits(num_bits);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return bits;
}

TrialResult run_trial(const DiscreteSystem& sys, const RunConfig& cfg, Rng& rng) {
    sys.validate();
    cfg.validate();
    const std::uint64_t K = cfg.num_bits;

    TrialResult res;
    if (cfg.keep_traces) {
        res.error_trace.resize(K);
        res.d_trace.resize(K + 1);
        res.d_trace[0] = cfg.xhat0 - cfg.x0;
    }

    const std::vector<std::uint8_t> bits = generate_input(rng, K);
    double x = cfg.x0;
    double xhat = cfg.xhat0;
    for (std::uint64_t k = 0; k < K; ++k) {
        x = evolve_state(sys, x, bits[k]);
        const double y = observe(sys, x, rng);
        const OsaStep step = osa_step(sys, xhat, y);
        xhat = step.xhat;
        const bool err = step.uhat != bits[k];
        res.bit_errors += err;
        if (cfg.keep_traces) {
            res.error_trace[k] = err;
            res.d_trace[k + 1] = xhat - x;
        }
    }
    return res;
}

namespace {

// Static chunking over [0, total); fn(i) must only touch slot i of any
// shared output so results are independent of the worker count.
template <typename Fn>
void parallel_for(std::uint64_t total, unsigned num_threads, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned workers = num_threads == 0 ? hw : num_threads;
    if (workers > total) workers = static_cast<unsigned>(total);
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        const std::uint64_t begin = total * t / workers;
        const std::uint64_t end = total * (t + 1) / workers;
        pool.emplace_back([begin, end, &fn] {
            for (std::uint64_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

MseEstimate monte_carlo_mse(const DiscreteSystem& sys, const RunConfig& cfg) {
    sys.validate();
    cfg.validate();

    RunConfig trial_cfg = cfg;
    trial_cfg.keep_traces = false;
    std::vector<double> rates(cfg.num_runs);
    parallel_for(cfg.num_runs, cfg.num_threads, [&](std::uint64_t i) {
        Rng rng(cfg.seed, i);
        const TrialResult r = run_trial(sys, trial_cfg, rng);
        rates[i] = static_cast<double>(r.bit_errors) / static_cast<double>(cfg.num_bits);
    });

    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(cfg.num_runs);

    double ss = 0.0;
    for (double r : rates) ss += (r - mean) * (r - mean);
    const double std_error =
        cfg.num_runs > 1
            ? std::sqrt(ss / static_cast<double>(cfg.num_runs - 1)) /
                  std::sqrt(static_cast<double>(cfg.num_runs))
            : 0.0;

    return {mean, std_error, cfg.num_runs, cfg.num_bits};
}

std::vector<SnrPoint> sweep_snr(const DiscreteSystem& sys_base,
                                const std::vector<double>& snr_db_list, const RunConfig& cfg) {
    if (snr_db_list.empty())
        throw Error(ErrorCode::InvalidParam, "sweep_snr: SNR list must be nonempty");
    std::vector<SnrPoint> curve;
    curve.reserve(snr_db_list.size());
    for (double db : snr_db_list) {
        const DiscreteSystem sys = with_snr_db(sys_base, db);
        curve.push_back({db, monte_carlo_mse(sys, cfg)});
    }
    return curve;
}

} // namespace osa
