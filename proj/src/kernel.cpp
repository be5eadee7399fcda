#include "osa/kernel.hpp"

#include "osa/contraction.hpp"
#include "osa/simd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace osa {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double renormalize(std::vector<double>& w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    if (!(sum > 0.0))
        throw Error(ErrorCode::InvalidParam, "measure evolution lost all mass");
    simd::scale(w.data(), 1.0 / sum, w.size());
    return sum;
}

} // namespace

KernelRow transition_probs(const DiscreteSystem& sys, double z) {
    // |c| keeps these valid for either sign of c: the decoder threshold
    // flips with the sign, so the error law depends on c only through |c|.
    // Computing t = (|c| q) z first makes p_plus(z) and p_minus(-z)
    // bit-identical, not just equal in exact arithmetic.
    const double ca = std::abs(sys.c);
    const double t = (ca * sys.q) * z;
    const double half = 0.5 * (ca * sys.w);
    const double inv = 1.0 / (sys.sigma * kSqrt2);
    KernelRow row;
    row.p_plus = 0.25 * std::erfc((t + half) * inv);
    row.p_minus = 0.25 * std::erfc((-t + half) * inv);
    // Single complement of the pre-summed pair: (p_plus + p_minus) + p_stay
    // then reproduces 1.0 exactly under round-to-nearest.
    row.p_stay = 1.0 - (row.p_plus + row.p_minus);
    return row;
}

double error_rate_g(const DiscreteSystem& sys, double z) {
    const KernelRow row = transition_probs(sys, z);
    return row.p_plus + row.p_minus;
}

double lipschitz_g_bound(const DiscreteSystem& sys) {
    return std::abs(sys.c) * sys.q / (sys.sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> error_rate_on_grid(const DiscreteSystem& sys, const Grid& grid) {
    grid.validate();
    std::vector<double> g(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) g[i] = error_rate_g(sys, grid.node(i));
    return g;
}

TransferOperator::TransferOperator(const DiscreteSystem& sys, const Grid& grid) : grid_(grid) {
    sys.validate();
    grid.validate();
    const int n = grid.n;
    const double h = grid.h();
    const double eps =
        64.0 * 2.220446049250313e-16 * std::max(std::abs(grid.lo), std::abs(grid.hi));

    // Each source node spreads over three targets, each target over its
    // two bracketing nodes: a fixed 6-entries-per-source layout.
    struct Entry {
        std::int32_t row;
        std::int32_t col;
        double val;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n) * 6);

    auto deposit = [&](double target, std::int32_t col, double mass) {
        if (target < grid.lo - eps || target > grid.hi + eps)
            throw Error(ErrorCode::OutOfDomain,
                        "push_forward: target " + std::to_string(target) + " outside grid [" +
                            std::to_string(grid.lo) + ", " + std::to_string(grid.hi) + "]");
        double s = (target - grid.lo) / h;
        if (s < 0.0) s = 0.0;
        std::int32_t j = static_cast<std::int32_t>(s);
        if (j > n - 2) j = n - 2;
        double f = s - j;
        if (f < 0.0) f = 0.0;
        if (f > 1.0) f = 1.0;
        entries.push_back({j, col, mass * (1.0 - f)});
        entries.push_back({j + 1, col, mass * f});
    };

    for (std::int32_t i = 0; i < n; ++i) {
        const double z = grid.node(i);
        const KernelRow row = transition_probs(sys, z);
        const double base = sys.q * z;
        deposit(base, i, row.p_stay);
        deposit(base + sys.w, i, row.p_plus);
        deposit(base - sys.w, i, row.p_minus);
    }

    row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Entry& e : entries) ++row_ptr_[static_cast<std::size_t>(e.row) + 1];
    for (int r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];

    cols_.resize(entries.size());
    vals_.resize(entries.size());
    std::vector<std::int32_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    // Entries are visited in (source, branch, side) order, so within each
    // row the layout is deterministic and SpMV sums are bit-stable.
    for (const Entry& e : entries) {
        const std::int32_t at = cursor[e.row]++;
        cols_[at] = e.col;
        vals_[at] = e.val;
    }
}

void TransferOperator::apply_raw(const double* in, double* out) const {
    simd::spmv(row_ptr_.data(), cols_.data(), vals_.data(),
               static_cast<std::size_t>(grid_.n), in, out);
}

DiscreteMeasure TransferOperator::apply(const DiscreteMeasure& mu) const {
    if (!(mu.grid == grid_))
        throw Error(ErrorCode::GridMismatch, "transfer operator applied to a foreign grid");
    DiscreteMeasure out{grid_, std::vector<double>(mu.weights.size())};
    apply_raw(mu.weights.data(), out.weights.data());
    renormalize(out.weights);
    return out;
}

DiscreteMeasure push_forward(const DiscreteSystem& sys, const DiscreteMeasure& mu) {
    return TransferOperator(sys, mu.grid).apply(mu);
}

double cesaro_mse(const DiscreteSystem& sys, double alpha, std::uint64_t num_steps,
                  const Grid& grid) {
    if (num_steps < 1) throw Error(ErrorCode::InvalidParam, "cesaro_mse: num_steps must be >= 1");
    const TransferOperator T(sys, grid);
    const std::vector<double> g = error_rate_on_grid(sys, grid);
    DiscreteMeasure mu = delta_measure(grid, alpha);
    std::vector<double> next(mu.weights.size());

    double acc = 0.0;
    for (std::uint64_t k = 0; k < num_steps; ++k) {
        acc += simd::dot(g.data(), mu.weights.data(), mu.weights.size());
        if (k + 1 < num_steps) {
            T.apply_raw(mu.weights.data(), next.data());
            mu.weights.swap(next);
            renormalize(mu.weights);
        }
    }
    return acc / static_cast<double>(num_steps);
}

StationaryResult stationary_measure(const DiscreteSystem& sys, const Grid& grid, double tol,
                                    std::uint64_t max_iter, double alpha) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParam, "stationary_measure: tol must be > 0");
    const TransferOperator T(sys, grid);
    const std::size_t n = static_cast<std::size_t>(grid.n);

    DiscreteMeasure mu = delta_measure(grid, alpha);
    std::vector<double> sum = mu.weights; // unnormalized running Cesaro sum
    std::vector<double> next(n);

    auto average = [&](std::uint64_t count) {
        DiscreteMeasure nu{grid, sum};
        simd::scale(nu.weights.data(), 1.0 / static_cast<double>(count), n);
        renormalize(nu.weights);
        return nu;
    };
    auto residual_of = [&](const DiscreteMeasure& nu) {
        DiscreteMeasure pushed{grid, std::vector<double>(n)};
        T.apply_raw(nu.weights.data(), pushed.weights.data());
        renormalize(pushed.weights);
        return wasserstein1(pushed, nu);
    };

    std::uint64_t count = 1; // measures accumulated: mu_0 .. mu_{count-1}
    std::uint64_t checkpoint = 64;
    double last_gap = std::numeric_limits<double>::infinity();
    DiscreteMeasure prev_avg{grid, {}};

    while (count - 1 < max_iter) {
        T.apply_raw(mu.weights.data(), next.data());
        mu.weights.swap(next);
        renormalize(mu.weights);
        simd::add_inplace(sum.data(), mu.weights.data(), n);
        ++count;

        if (count == checkpoint) {
            DiscreteMeasure nu = average(count);
            if (!prev_avg.weights.empty()) {
                last_gap = wasserstein1(prev_avg, nu);
                if (last_gap < tol) {
                    // The doubling gap can pass while the average still
                    // drifts; accept only once the fixed-point defect is
                    // comparably small, else keep iterating.
                    const double res = residual_of(nu);
                    if (res < 5.0 * tol) return {std::move(nu), count - 1, last_gap, res};
                }
            }
            prev_avg = std::move(nu);
            checkpoint *= 2;
        }
    }
    throw NotConverged("stationary_measure: no convergence within " + std::to_string(max_iter) +
                           " iterations (last checkpoint gap " + std::to_string(last_gap) + ")",
                       last_gap, count - 1);
}

Prediction predicted_mse(const DiscreteSystem& sys, double alpha, const Grid& grid, double tol,
                         std::uint64_t max_iter) {
    const ContractionReport rep = sufficient_condition(sys);
    Regime regime = Regime::Unverified;
    if (rep.branch != ContractionBranch::Unverified || numeric_sup_Fprime(sys, grid) < 1.0)
        regime = Regime::Contractive;

    const StationaryResult st = stationary_measure(sys, grid, tol, max_iter, alpha);
    const std::vector<double> g = error_rate_on_grid(sys, grid);
    const double value = simd::dot(g.data(), st.nu.weights.data(), g.size());
    return {value, regime, st.iterations, st.w1_gap, st.w1_residual};
}

TreeResult exact_tree_mse(const DiscreteSystem& sys, double alpha, int num_steps) {
    sys.validate();
    if (num_steps < 1)
        throw Error(ErrorCode::InvalidParam, "exact_tree_mse: num_steps must be >= 1");
    if (num_steps > 14)
        throw Error(ErrorCode::HorizonTooLarge,
                    "exact_tree_mse: num_steps " + std::to_string(num_steps) +
                        " exceeds the supported horizon 14");
    if (!std::isfinite(alpha))
        throw Error(ErrorCode::InvalidParam, "exact_tree_mse: alpha must be finite");

    struct Atom {
        double value;
        double prob;
    };
    std::vector<Atom> atoms{{alpha, 1.0}};
    std::vector<Atom> children;

    double acc = 0.0;
    for (int k = 0; k < num_steps; ++k) {
        for (const Atom& a : atoms) acc += a.prob * error_rate_g(sys, a.value);
        if (k + 1 == num_steps) break;

        children.clear();
        children.reserve(atoms.size() * 3);
        for (const Atom& a : atoms) {
            const KernelRow row = transition_probs(sys, a.value);
            const double base = sys.q * a.value;
            children.push_back({base + sys.w, a.prob * row.p_plus});
            children.push_back({base, a.prob * row.p_stay});
            children.push_back({base - sys.w, a.prob * row.p_minus});
        }
        std::sort(children.begin(), children.end(),
                  [](const Atom& a, const Atom& b) { return a.value < b.value; });

        atoms.clear();
        for (const Atom& ch : children) {
            if (!atoms.empty() && ch.value - atoms.back().value <= 1e-12)
                atoms.back().prob += ch.prob;
            else
                atoms.push_back(ch);
        }
    }
    return {acc / num_steps, atoms.size()};
}

} // namespace osa
