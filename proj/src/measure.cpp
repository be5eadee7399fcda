#include "osa/measure.hpp"

#include <cmath>
#include <string>

namespace osa {

void Grid::validate() const {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw Error(ErrorCode::InvalidParam, "grid: need finite lo < hi");
    if (n < 3 || n % 2 == 0)
        throw Error(ErrorCode::InvalidParam,
                    "grid: n must be odd and >= 3, got " + std::to_string(n));
}

Grid Grid::state_space(const DiscreteSystem& sys, int n) {
    const Interval s = state_space_bounds(sys);
    Grid g{s.lo, s.hi, n};
    g.validate();
    return g;
}

double DiscreteMeasure::total_mass() const {
    double sum = 0.0;
    for (double v : weights) sum += v;
    return sum;
}

double DiscreteMeasure::mean() const {
    double m = 0.0;
    for (int i = 0; i < grid.n; ++i) m += weights[i] * grid.node(i);
    return m;
}

DiscreteMeasure delta_measure(const Grid& grid, double alpha) {
    grid.validate();
    const double h = grid.h();
    const double eps = 64.0 * 2.220446049250313e-16 * std::max(std::abs(grid.lo), std::abs(grid.hi));
    if (alpha < grid.lo - eps || alpha > grid.hi + eps)
        throw Error(ErrorCode::OutOfDomain,
                    "delta_measure: alpha = " + std::to_string(alpha) + " outside [" +
                        std::to_string(grid.lo) + ", " + std::to_string(grid.hi) + "]");
    double s = (alpha - grid.lo) / h;
    if (s < 0.0) s = 0.0;
    int j = static_cast<int>(s);
    if (j > grid.n - 2) j = grid.n - 2;
    double f = s - j;
    if (f < 0.0) f = 0.0;
    if (f > 1.0) f = 1.0;

    DiscreteMeasure mu{grid, std::vector<double>(static_cast<std::size_t>(grid.n), 0.0)};
    mu.weights[j] = 1.0 - f;
    mu.weights[j + 1] = f;
    return mu;
}

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!(mu.grid == nu.grid))
        throw Error(ErrorCode::GridMismatch, "wasserstein1: measures live on different grids");
    double cdf_diff = 0.0;
    double acc = 0.0;
    for (int i = 0; i < mu.grid.n - 1; ++i) {
        cdf_diff += mu.weights[i] - nu.weights[i];
        acc += std::abs(cdf_diff);
    }
    return acc * mu.grid.h();
}

} // namespace osa
