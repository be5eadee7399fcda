#include "osa/kernel.hpp"

#include "oracles.hpp"
#include "osa/chain.hpp"
#include "osa/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace osa;

namespace {

// cw/sigma = 2, the documented reference point.
const DiscreteSystem kSnr2{0.3, 1.0, 1.0, 0.5};
// Contractive reference parameters.
const DiscreteSystem kContractive{0.2, 1.0, 1.0, 1.0};

DiscreteMeasure random_measure(const Grid& grid, Rng& rng) {
    DiscreteMeasure mu{grid, std::vector<double>(static_cast<std::size_t>(grid.n))};
    double sum = 0.0;
    for (auto& w : mu.weights) {
        w = rng.uniform();
        sum += w;
    }
    for (auto& w : mu.weights) w /= sum;
    return mu;
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("transition probabilities at z = 0") {
    const KernelRow row = transition_probs(kSnr2, 0.0);
    // 1/4 erfc(1/sqrt(2)) = Q(1)/2, pinned to full precision.
    CHECK(row.p_plus == doctest::Approx(0.07932762696572854).epsilon(1e-13));
    CHECK(row.p_minus == row.p_plus);
    CHECK(error_rate_g(kSnr2, 0.0) == doctest::Approx(0.15865525393145707).epsilon(1e-13));

    SUBCASE("quadrature oracle agrees") {
        // p_plus(z) = P[U=0] P[N > cqz + cw/2] with N ~ Normal(0, sigma^2).
        for (double z : {-1.2, -0.4, 0.0, 0.3, 0.9}) {
            const KernelRow r = transition_probs(kSnr2, z);
            const double arg = (kSnr2.c * kSnr2.q * z + kSnr2.c * kSnr2.w / 2) / kSnr2.sigma;
            CHECK(r.p_plus == doctest::Approx(0.5 * oracles::normal_tail(arg)).epsilon(1e-9));
        }
    }
}

TEST_CASE("singular point z = w/(2q) has conditional error one half") {
    for (const DiscreteSystem& sys :
         {kSnr2, kContractive, DiscreteSystem{0.45, 0.8, 2.0, 0.17}}) {
        const double z = sys.w / (2.0 * sys.q);
        const KernelRow row = transition_probs(sys, z);
        CHECK(std::abs(row.p_minus - 0.25) <= 1e-13);
        // p_minus is the joint P[U=1, decoded 0]; conditionally on U=1 it
        // doubles, giving exactly 1/2.
        CHECK(std::abs(2.0 * row.p_minus - 0.5) <= 1e-12);
    }
}

TEST_CASE("large |z| limits") {
    const KernelRow row = transition_probs(kSnr2, 1e9);
    CHECK(row.p_plus <= 1e-300);
    CHECK(row.p_minus == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("row sums are exactly one and branch bounds hold") {
    Rng rng(31, 0);
    for (const DiscreteSystem& sys :
         {kSnr2, kContractive, DiscreteSystem{0.7, 0.5, -1.5, 0.2},
          DiscreteSystem{0.9, 2.0, 0.3, 3.0}}) {
        const double zmax = 2.0 * sys.w / (1.0 - sys.q);
        const double singular = sys.w / (2.0 * sys.q);
        for (int i = 0; i < 1000; ++i) {
            const double z = zmax * (2.0 * rng.uniform() - 1.0);
            const KernelRow row = transition_probs(sys, z);
            CHECK(row.p_plus + row.p_minus + row.p_stay == 1.0);
            CHECK(row.p_plus >= 0.0);
            CHECK(row.p_minus >= 0.0);
            CHECK(row.p_stay >= 0.0);
            // erfc <= 2 caps each branch at 1/2; the 1/4 level is crossed
            // exactly at the singular points -w/(2q) and +w/(2q).
            CHECK(row.p_plus <= 0.5);
            CHECK(row.p_minus <= 0.5);
            if (z > -singular) CHECK(row.p_plus < 0.25);
            if (z < singular) CHECK(row.p_minus < 0.25);
        }
        CHECK(transition_probs(sys, 0.0).p_plus < 0.25);
        CHECK(transition_probs(sys, singular + 0.1).p_minus > 0.25);
    }
}

TEST_CASE("kernel symmetry p_plus(z) = p_minus(-z) is bit-exact") {
    Rng rng(32, 0);
    for (const DiscreteSystem& sys : {kSnr2, DiscreteSystem{0.6, 1.3, -0.8, 0.45}}) {
        for (int i = 0; i < 1000; ++i) {
            const double z = 4.0 * (2.0 * rng.uniform() - 1.0);
            const KernelRow a = transition_probs(sys, z);
            const KernelRow b = transition_probs(sys, -z);
            CHECK(a.p_plus == b.p_minus);
            CHECK(a.p_minus == b.p_plus);
            CHECK(error_rate_g(sys, z) == error_rate_g(sys, -z));
        }
    }
}

TEST_CASE("negative c gives the same error kernel as |c|") {
    const DiscreteSystem pos{0.4, 1.1, 0.9, 0.33};
    DiscreteSystem neg = pos;
    neg.c = -pos.c;
    for (double z : {-2.0, -0.5, 0.0, 0.1, 1.7}) {
        const KernelRow a = transition_probs(pos, z);
        const KernelRow b = transition_probs(neg, z);
        CHECK(a.p_plus == b.p_plus);
        CHECK(a.p_minus == b.p_minus);
    }
}

TEST_CASE("very noisy channel decodes at chance level") {
    DiscreteSystem sys = kSnr2;
    sys.sigma = 1e6 * std::abs(sys.c) * sys.w;
    for (double z : {-3.0, 0.0, 0.42, 5.0})
        CHECK(error_rate_g(sys, z) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("g and the kernel entries respect the Lipschitz bound") {
    for (const DiscreteSystem& sys : {kSnr2, kContractive, DiscreteSystem{0.5, 1.0, 1.0, 0.25}}) {
        const double bound = lipschitz_g_bound(sys);
        const Grid fine = Grid::state_space(sys, 20001);
        const std::vector<double> g = error_rate_on_grid(sys, fine);
        double max_slope = 0.0;
        for (int i = 0; i + 1 < fine.n; ++i)
            max_slope = std::max(max_slope, std::abs(g[i + 1] - g[i]) / fine.h());
        CHECK(max_slope <= bound * (1.0 + 1e-6));

        // The individual entries obey the same derivative bound.
        double max_entry_slope = 0.0;
        for (int i = 0; i + 1 < fine.n; ++i) {
            const KernelRow a = transition_probs(sys, fine.node(i));
            const KernelRow b = transition_probs(sys, fine.node(i + 1));
            max_entry_slope = std::max(max_entry_slope, std::abs(b.p_plus - a.p_plus) / fine.h());
            max_entry_slope =
                std::max(max_entry_slope, std::abs(b.p_minus - a.p_minus) / fine.h());
        }
        CHECK(max_entry_slope <= bound * (1.0 + 1e-6));
    }
}

TEST_CASE("push_forward of a point mass reproduces the kernel row") {
    // q = 0.5, span [-2,2], n = 41: targets 0 and +/-w land on nodes.
    const DiscreteSystem sys{0.5, 1.0, 1.0, 0.5};
    const Grid grid = Grid::state_space(sys, 41);
    const DiscreteMeasure mu = delta_measure(grid, 0.0);
    const DiscreteMeasure out = push_forward(sys, mu);
    const KernelRow row = transition_probs(sys, 0.0);

    const int center = (grid.n - 1) / 2;
    const int off = 10; // w / h = 1 / 0.1
    CHECK(out.weights[center] == doctest::Approx(row.p_stay).epsilon(1e-12));
    CHECK(out.weights[center + off] == doctest::Approx(row.p_plus).epsilon(1e-12));
    CHECK(out.weights[center - off] == doctest::Approx(row.p_minus).epsilon(1e-12));
}

TEST_CASE("mass and first moment behave under repeated pushes") {
    const DiscreteSystem sys = kContractive;
    const Grid grid = Grid::state_space(sys, 401);
    const TransferOperator T(sys, grid);
    DiscreteMeasure mu = delta_measure(grid, 0.31);
    for (int k = 0; k < 10000; ++k) mu = T.apply(mu);
    CHECK(std::abs(mu.total_mass() - 1.0) < 1e-12);
    for (double w : mu.weights) CHECK(w >= 0.0);

    SUBCASE("one-step mean identity") {
        Rng rng(33, 0);
        for (int trial = 0; trial < 20; ++trial) {
            const DiscreteMeasure nu = random_measure(grid, rng);
            const DiscreteMeasure pushed = T.apply(nu);
            double drift = 0.0;
            for (int i = 0; i < grid.n; ++i) {
                const KernelRow row = transition_probs(sys, grid.node(i));
                drift += nu.weights[i] * (row.p_plus - row.p_minus);
            }
            CHECK(pushed.mean() ==
                  doctest::Approx(sys.q * nu.mean() + sys.w * drift).epsilon(1e-11));
        }
    }
}

TEST_CASE("transfer operator rejects misuse") {
    const DiscreteSystem sys = kContractive;
    const Interval s = state_space_bounds(sys);

    SUBCASE("truncated grid") {
        const Grid narrow{s.lo * 0.5, s.hi * 0.5, 101};
        CHECK_THROWS_AS(TransferOperator(sys, narrow), Error);
    }
    SUBCASE("foreign grid on apply") {
        const TransferOperator T(sys, Grid::state_space(sys, 101));
        const DiscreteMeasure mu = delta_measure(Grid::state_space(sys, 103), 0.0);
        CHECK_THROWS_AS(T.apply(mu), Error);
    }
    SUBCASE("wider grid is fine") {
        const Grid wide{s.lo * 2.0, s.hi * 2.0, 201};
        CHECK_NOTHROW(TransferOperator(sys, wide));
    }
}

TEST_CASE("cesaro_mse single step equals g(alpha)") {
    const Grid grid = Grid::state_space(kSnr2, 401);
    CHECK(cesaro_mse(kSnr2, 0.0, 1, grid) ==
          doctest::Approx(error_rate_g(kSnr2, 0.0)).epsilon(1e-12));
    // Off-node alpha: equal to the interpolated g.
    const double alpha = 0.1234;
    const DiscreteMeasure mu = delta_measure(grid, alpha);
    double interp = 0.0;
    for (int i = 0; i < grid.n; ++i) interp += mu.weights[i] * error_rate_g(kSnr2, grid.node(i));
    CHECK(cesaro_mse(kSnr2, alpha, 1, grid) == doctest::Approx(interp).epsilon(1e-12));
}

TEST_CASE("cesaro_mse is nondecreasing in sigma") {
    double prev = 0.0;
    for (double ratio : {4.0, 2.0, 1.0, 0.5, 0.25}) {
        DiscreteSystem sys = kContractive;
        sys.sigma = sys.c * sys.w / ratio;
        const Grid grid = Grid::state_space(sys, 801);
        const double v = cesaro_mse(sys, 0.0, 50, grid);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("cesaro_mse converges to the tree oracle under refinement") {
    const DiscreteSystem sys{0.45, 1.0, 1.0, 0.5};
    const TreeResult tree = exact_tree_mse(sys, 0.0, 10);
    const Grid coarse = Grid::state_space(sys, 2001);
    const Grid fine = Grid::state_space(sys, 4001);
    const double v1 = cesaro_mse(sys, 0.0, 10, coarse);
    const double v2 = cesaro_mse(sys, 0.0, 10, fine);
    CHECK(std::abs(v2 - tree.mse) <= 1e-3);
    // h -> h/2 shrinks the O(h^2) error about 4x; Richardson kills it.
    const double extrapolated = (4.0 * v2 - v1) / 3.0;
    CHECK(std::abs(extrapolated - tree.mse) <= 1e-4);
}

TEST_CASE("exact_tree_mse basics") {
    CHECK(exact_tree_mse(kSnr2, 0.3, 1).mse ==
          doctest::Approx(error_rate_g(kSnr2, 0.3)).epsilon(1e-14));
    CHECK(exact_tree_mse(kSnr2, 0.3, 1).atom_count == 1);

    SUBCASE("horizon limit") {
        CHECK_THROWS_AS(exact_tree_mse(kSnr2, 0.0, 15), Error);
        try {
            exact_tree_mse(kSnr2, 0.0, 15);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::HorizonTooLarge);
        }
        CHECK_THROWS_AS(exact_tree_mse(kSnr2, 0.0, 0), Error);
        CHECK_NOTHROW(exact_tree_mse(kSnr2, 0.0, 14));
    }
    SUBCASE("probability conservation via the chance-level limit") {
        // With sigma >> cw, g is 1/2 everywhere, so the Cesaro sum equals
        // half the retained probability mass; any leak would show here.
        DiscreteSystem noisy = kSnr2;
        noisy.sigma = 1e8;
        CHECK(exact_tree_mse(noisy, 0.0, 12).mse == doctest::Approx(0.5).epsilon(1e-7));
    }
}

TEST_CASE("exact_tree_mse matches Monte Carlo") {
    const DiscreteSystem sys = with_snr_db(discretize({-1.0, 1.0, 1.0, 1.0, 1.0}), 6.0);
    RunConfig cfg;
    cfg.num_bits = 10;
    cfg.num_runs = 100000;
    cfg.seed = 1234;
    const MseEstimate mc = monte_carlo_mse(sys, cfg);
    const TreeResult tree = exact_tree_mse(sys, 0.0, 10);
    CHECK(std::abs(mc.mean - tree.mse) <= 4.0 * mc.std_error);
}

TEST_CASE("stationary_measure fixed point, symmetry, alpha independence") {
    const DiscreteSystem sys = kContractive;
    const Grid grid = Grid::state_space(sys, 801);
    const double tol = 1e-4;
    const StationaryResult st = stationary_measure(sys, grid, tol, 10'000'000, 0.0);

    CHECK(st.w1_residual < 5.0 * tol);
    CHECK(st.w1_gap < tol);

    SUBCASE("residual recomputes to the reported value") {
        const TransferOperator T(sys, grid);
        CHECK(wasserstein1(T.apply(st.nu), st.nu) == doctest::Approx(st.w1_residual).epsilon(1e-9));
    }
    SUBCASE("symmetric about zero when started at zero") {
        DiscreteMeasure mirror = st.nu;
        for (int i = 0; i < grid.n; ++i) mirror.weights[i] = st.nu.weights[grid.n - 1 - i];
        CHECK(wasserstein1(st.nu, mirror) < tol);
    }
    SUBCASE("two starting points give the same measure") {
        const StationaryResult other = stationary_measure(sys, grid, tol, 10'000'000, 0.8);
        CHECK(wasserstein1(st.nu, other.nu) < 10.0 * tol);
    }
}

TEST_CASE("stationary_measure reports non-convergence") {
    const DiscreteSystem sys = kContractive;
    const Grid grid = Grid::state_space(sys, 101);
    try {
        stationary_measure(sys, grid, 1e-12, 10, 0.0);
        FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
        CHECK(e.code() == ErrorCode::NotConverged);
        CHECK(e.iterations() == 10);
    }
}

TEST_CASE("predicted_mse limits and regime tags") {
    const DiscreteSystem base = discretize({-1.0, 1.0, 1.0, 1.0, 1.0});

    SUBCASE("very low SNR sits at chance level") {
        const DiscreteSystem sys = with_snr_db(base, -20.0);
        const Grid grid = Grid::state_space(sys, 1501);
        const Prediction p = predicted_mse(sys, 0.0, grid, 1e-4, 10'000'000);
        CHECK(p.value >= 0.45);
        CHECK(p.value <= 0.5);
        // q = e^-1 <= 0.6738..., snr <= 4: the low-SNR branch applies.
        CHECK(p.regime == Regime::Contractive);
    }
    SUBCASE("high SNR decodes nearly perfectly") {
        const DiscreteSystem sys = with_snr_db(base, 20.0);
        const Grid grid = Grid::state_space(sys, 1501);
        const Prediction p = predicted_mse(sys, 0.0, grid, 1e-4, 10'000'000);
        CHECK(p.value < 0.02);
        CHECK(p.value > 0.0);
        // q = e^-1 > 1/3 puts the singular points inside S at high SNR.
        CHECK(p.regime == Regime::Unverified);
    }
}

} // TEST_SUITE
