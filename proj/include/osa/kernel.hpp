#pragma once

#include "osa/measure.hpp"
#include "osa/system.hpp"

#include <cstdint>
#include <vector>

namespace osa {

// One-step law of the decoder error D given the current value z: the
// error moves to qz + w, qz - w, or qz depending on whether the decoded
// bit overshoots, undershoots, or matches the true bit.
struct KernelRow {
    double p_plus;  // P[D' = qz + w]
    double p_minus; // P[D' = qz - w]
    double p_stay;  // P[D' = qz]
};

KernelRow transition_probs(const DiscreteSystem& sys, double z);

// Per-step bit error probability g(z) = p_plus + p_minus.
double error_rate_g(const DiscreteSystem& sys, double z);

// Upper bound on the Lipschitz constant of g over the whole line.
double lipschitz_g_bound(const DiscreteSystem& sys);

// g sampled on the grid nodes, for integrating against measures.
std::vector<double> error_rate_on_grid(const DiscreteSystem& sys, const Grid& grid);

// Grid transfer operator of the error process: a CSR matrix T with
// T[j,i] = mass that node i sends to node j in one step, each of the
// three branch targets deposited on its two bracketing nodes.  Targets
// q z +/- w stay inside any grid containing the invariant interval, so
// construction only throws OutOfDomain on a grid that truncates it.
class TransferOperator {
  public:
    TransferOperator(const DiscreteSystem& sys, const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::size_t nnz() const { return vals_.size(); }

    // out = T in (both length grid.n); no normalization.
    void apply_raw(const double* in, double* out) const;

    // One step of the measure evolution, renormalized to unit mass.
    DiscreteMeasure apply(const DiscreteMeasure& mu) const;

  private:
    Grid grid_;
    std::vector<std::int32_t> row_ptr_;
    std::vector<std::int32_t> cols_;
    std::vector<double> vals_;
};

// One-step push-forward of mu under the error kernel.
DiscreteMeasure push_forward(const DiscreteSystem& sys, const DiscreteMeasure& mu);

// Time-averaged bit error rate over horizon num_steps starting from a
// point mass at alpha: (1/K) sum_{k=0}^{K-1} E[g(D_k)].
double cesaro_mse(const DiscreteSystem& sys, double alpha, std::uint64_t num_steps,
                  const Grid& grid);

struct StationaryResult {
    DiscreteMeasure nu;       // Cesaro average at the accepted checkpoint
    std::uint64_t iterations; // number of kernel applications performed
    double w1_gap;            // W1 between the last two checkpoint averages
    double w1_residual;       // W1(nu T, nu), fixed-point defect
};

// Cesaro averages of delta_alpha T^k with doubling checkpoints; stops
// when consecutive checkpoint averages are within tol in W1 and the
// fixed-point residual is small.  Throws NotConverged past max_iter.
StationaryResult stationary_measure(const DiscreteSystem& sys, const Grid& grid, double tol,
                                    std::uint64_t max_iter, double alpha = 0.0);

enum class Regime { Contractive, Unverified };

struct Prediction {
    double value;             // asymptotic mean bit error rate
    Regime regime;            // sufficient-condition verdict for (sys)
    std::uint64_t iterations;
    double w1_gap;
    double w1_residual;
};

// Long-run MSE of the decoder: integral of g against the stationary
// Cesaro measure started at alpha.
Prediction predicted_mse(const DiscreteSystem& sys, double alpha, const Grid& grid, double tol,
                         std::uint64_t max_iter);

// Grid-free oracle: evolves the exact atom-supported law of D_k for K
// steps (atoms merge when within 1e-12).  K is capped because the atom
// count can double every step.  Returns the exact Cesaro MSE.
struct TreeResult {
    double mse;
    std::size_t atom_count; // atoms in the final law
};

TreeResult exact_tree_mse(const DiscreteSystem& sys, double alpha, int num_steps);

} // namespace osa
