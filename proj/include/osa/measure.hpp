#pragma once

#include "osa/errors.hpp"
#include "osa/system.hpp"

#include <cstdint>
#include <vector>

namespace osa {

// Uniform grid of n nodes over [lo, hi].  n is odd so that 0 is a node
// whenever the interval is symmetric, which keeps mirrored measures exact.
struct Grid {
    double lo = -1.0;
    double hi = 1.0;
    int n = 3;

    void validate() const;
    double h() const { return (hi - lo) / (n - 1); }
    double node(int i) const { return lo + i * h(); }
    bool operator==(const Grid&) const = default;

    // Grid spanning exactly the invariant interval of the error process.
    static Grid state_space(const DiscreteSystem& sys, int n);
};

// Probability measure with atoms on grid nodes.  Weights are nonnegative
// and sum to 1 up to rounding; evolution renormalizes every step.
struct DiscreteMeasure {
    Grid grid;
    std::vector<double> weights;

    double total_mass() const;
    double mean() const;
};

// Point mass at alpha deposited on the two bracketing nodes so that total
// mass and mean are preserved.  Throws OutOfDomain if alpha is outside
// the grid.
DiscreteMeasure delta_measure(const Grid& grid, double alpha);

// Wasserstein-1 distance of two measures on the same grid, computed as
// the integral of |CDF difference|.  Throws GridMismatch otherwise.
double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

} // namespace osa
