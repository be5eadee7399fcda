#pragma once

#include "osa/measure.hpp"
#include "osa/rng.hpp"
#include "osa/system.hpp"

#include <cstdint>

namespace osa {

enum class ContractionBranch { ContractiveHighSnr, ContractiveLowSnr, Unverified };

const char* branch_name(ContractionBranch b);

// Verdict of the closed-form sufficient condition for average
// contraction of the error process, plus numerical diagnostics.
struct ContractionReport {
    double snr_ratio = 0.0;
    double q_threshold_high_snr = 0.0;
    double q_threshold_low_snr = 0.0;
    ContractionBranch branch = ContractionBranch::Unverified;
    double numeric_sup_Fprime = 0.0;
    bool has_empirical_ratio = false;
    double empirical_ratio = 0.0;
    // True when the closed form says Unverified but the numerical sup of
    // F' still certifies contraction; predicted_mse treats that as
    // contractive and this flag records the extension.
    bool numeric_only_certificate = false;
};

// q below which the high-SNR branch (snr_ratio > 4) contracts.
double q_threshold_high_snr();
// q below which the low-SNR branch (snr_ratio <= 4) contracts.
double q_threshold_low_snr();

// Conditional expectation F(x) = E[D_k | D_{k-1} = x] of the error
// process, whose slope controls average contraction.
double F(const DiscreteSystem& sys, double x);
double F_prime(const DiscreteSystem& sys, double x);
double F_second(const DiscreteSystem& sys, double x);

// Branch + thresholds only; numeric fields are left at zero.
ContractionReport sufficient_condition(const DiscreteSystem& sys);

// Max of F' over the grid span, refined by golden-section search in the
// bracketing cells; < 1 certifies contraction numerically.
double numeric_sup_Fprime(const DiscreteSystem& sys, const Grid& grid);

// Exact per-pair expectation E|w_I(x) - w_I(y)| of the one-step random
// map applied to two coupled states, in closed form.
double pair_contraction_closed(const DiscreteSystem& sys, double x, double y);

// Monte Carlo estimate of the same expectation over (U0, N1).
double pair_contraction_mc(const DiscreteSystem& sys, double x, double y,
                           std::uint64_t num_noise, Rng& rng);

// One draw of the random map w_I(x) given input bit u and noise n.
double irf_map(const DiscreteSystem& sys, double x, int u, double n);

struct EmpiricalContractionDiag {
    double max_sigma_deviation = 0.0; // worst |MC - closed| in MC std errors
};

// Max over sampled pairs (x,y) from S of E|w_I(x) - w_I(y)| / |x - y|.
// The returned ratio uses the closed-form expectation; each pair is also
// estimated by MC with num_noise draws and the worst deviation between
// the two is reported through diag when given.
double empirical_contraction(const DiscreteSystem& sys, std::uint64_t num_pairs,
                             std::uint64_t num_noise, Rng& rng,
                             EmpiricalContractionDiag* diag = nullptr);

// sufficient_condition plus the numerical diagnostics filled in.
ContractionReport full_report(const DiscreteSystem& sys, const Grid& grid,
                              std::uint64_t num_pairs = 0, std::uint64_t num_noise = 0,
                              std::uint64_t seed = 0);

} // namespace osa
