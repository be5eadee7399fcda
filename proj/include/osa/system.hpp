#pragma once

#include "osa/errors.hpp"

namespace osa {

// Continuous-time plant dx/dt = a x + b u sampled every tau seconds,
// observed through gain c with additive white Gaussian noise of std sigma.
struct ContinuousSystem {
    double a;     // must be < 0 (stable pole)
    double b;     // must be > 0
    double c;     // nonzero observation gain
    double tau;   // sampling period, > 0
    double sigma; // noise std, > 0

    void validate() const;
};

// Sampled form x_k = q x_{k-1} + w u_{k-1}, y_k = c x_k + n_k with
// binary inputs u in {0,1}.
struct DiscreteSystem {
    double q;     // pole, in (0,1)
    double w;     // input gain, > 0
    double c;     // nonzero observation gain
    double sigma; // noise std, > 0

    void validate() const;

    // Signal-to-noise ratio c^2 w^2 / sigma^2 of one bit at the output.
    double snr_ratio() const { return (c * w) * (c * w) / (sigma * sigma); }
};

// Zero-order-hold discretization: q = exp(tau a), w = -(b/a) (1 - q).
DiscreteSystem discretize(const ContinuousSystem& sys);

double snr_db(const DiscreteSystem& sys);

// Noise std that puts the system at the requested SNR in dB.
double sigma_for_snr(const DiscreteSystem& sys, double target_db);
double sigma_for_snr(double c, double w, double target_db);

DiscreteSystem with_sigma(DiscreteSystem sys, double sigma);
DiscreteSystem with_snr_db(DiscreteSystem sys, double db);

// Invariant interval S = [-w/(1-q), +w/(1-q)] of the decoder error process.
struct Interval {
    double lo, hi;
};
Interval state_space_bounds(const DiscreteSystem& sys);

} // namespace osa
