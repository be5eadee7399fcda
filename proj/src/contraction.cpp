#include "osa/contraction.hpp"

#include "osa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace osa {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

// Shared pieces of F and its derivatives: A = |c| q x + |c| w / 2 and
// B = |c| q x - |c| w / 2, the two decision-boundary distances.
struct FParts {
    double A;
    double B;
    double inv_sigma_sqrt2;
};

FParts f_parts(const DiscreteSystem& sys, double x) {
    const double ca = std::abs(sys.c);
    const double t = (ca * sys.q) * x;
    const double half = 0.5 * (ca * sys.w);
    return {t + half, t - half, 1.0 / (sys.sigma * kSqrt2)};
}

} // namespace

const char* branch_name(ContractionBranch b) {
    switch (b) {
    case ContractionBranch::ContractiveHighSnr: return "ContractiveHighSnr";
    case ContractionBranch::ContractiveLowSnr: return "ContractiveLowSnr";
    case ContractionBranch::Unverified:
    default: return "Unverified";
    }
}

double q_threshold_high_snr() {
    return 1.0 / (3.0 + std::sqrt(2.0 / (std::numbers::e * std::numbers::pi)));
}

double q_threshold_low_snr() {
    return 1.0 / (1.0 + std::sqrt(2.0 / (std::numbers::e * std::numbers::pi)));
}

double F(const DiscreteSystem& sys, double x) {
    const FParts p = f_parts(sys, x);
    return sys.q * x - 0.25 * sys.w * (std::erfc(p.A * p.inv_sigma_sqrt2) +
                                       std::erfc(p.B * p.inv_sigma_sqrt2));
}

double F_prime(const DiscreteSystem& sys, double x) {
    const FParts p = f_parts(sys, x);
    const double ca = std::abs(sys.c);
    const double s2 = 2.0 * sys.sigma * sys.sigma;
    const double coef = ca * sys.w * sys.q / (2.0 * sys.sigma * kSqrt2Pi);
    return sys.q + coef * (std::exp(-p.A * p.A / s2) + std::exp(-p.B * p.B / s2));
}

double F_second(const DiscreteSystem& sys, double x) {
    const FParts p = f_parts(sys, x);
    const double ca = std::abs(sys.c);
    const double s2 = 2.0 * sys.sigma * sys.sigma;
    const double coef = ca * sys.w * sys.q / (2.0 * sys.sigma * kSqrt2Pi);
    const double chain = ca * sys.q / (sys.sigma * sys.sigma);
    return -coef * chain * (p.A * std::exp(-p.A * p.A / s2) + p.B * std::exp(-p.B * p.B / s2));
}

ContractionReport sufficient_condition(const DiscreteSystem& sys) {
    sys.validate();
    ContractionReport rep;
    rep.snr_ratio = sys.snr_ratio();
    rep.q_threshold_high_snr = q_threshold_high_snr();
    rep.q_threshold_low_snr = q_threshold_low_snr();
    if (rep.snr_ratio > 4.0 && sys.q < rep.q_threshold_high_snr)
        rep.branch = ContractionBranch::ContractiveHighSnr;
    else if (rep.snr_ratio <= 4.0 && sys.q <= rep.q_threshold_low_snr)
        rep.branch = ContractionBranch::ContractiveLowSnr;
    else
        rep.branch = ContractionBranch::Unverified;
    return rep;
}

namespace {

double golden_section_max(const DiscreteSystem& sys, double a, double b) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = F_prime(sys, c);
    double fd = F_prime(sys, d);
    while (b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = F_prime(sys, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = F_prime(sys, d);
        }
    }
    return std::max(fc, fd);
}

} // namespace

double numeric_sup_Fprime(const DiscreteSystem& sys, const Grid& grid) {
    sys.validate();
    grid.validate();
    const int n = grid.n;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[i] = F_prime(sys, grid.node(i));

    double best = *std::max_element(vals.begin(), vals.end());
    // Refine every sampled local maximum (boundaries included); F' can
    // have up to two interior bumps plus the boundary values.
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
        const bool right_ok = i == n - 1 || vals[i] >= vals[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = grid.node(std::max(0, i - 1));
        const double b = grid.node(std::min(n - 1, i + 1));
        best = std::max(best, golden_section_max(sys, a, b));
    }
    return best;
}

double irf_map(const DiscreteSystem& sys, double x, int u, double n) {
    const double threshold = sys.c * (sys.q * x + sys.w * (0.5 - u));
    const int uhat = (sys.c > 0.0) ? (n > threshold) : (n < threshold);
    return sys.q * x + sys.w * (uhat - u);
}

double pair_contraction_closed(const DiscreteSystem& sys, double x, double y) {
    if (x < y) std::swap(x, y);
    const double ca = std::abs(sys.c);
    const double inv = 1.0 / (sys.sigma * kSqrt2);
    const double qd = sys.q * (x - y);
    double acc = 0.0;
    for (int u = 0; u <= 1; ++u) {
        // Probability that the decoded bits differ between the two
        // coupled states: the decision regions are nested for x > y.
        const double iu = 0.5 * (std::erfc(ca * (sys.q * y + sys.w * (0.5 - u)) * inv) -
                                 std::erfc(ca * (sys.q * x + sys.w * (0.5 - u)) * inv));
        acc += std::abs(qd - sys.w) * iu + qd * (1.0 - iu);
    }
    return 0.5 * acc;
}

double pair_contraction_mc(const DiscreteSystem& sys, double x, double y,
                           std::uint64_t num_noise, Rng& rng) {
    if (num_noise < 1)
        throw Error(ErrorCode::InvalidParam, "pair_contraction_mc: num_noise must be >= 1");
    double acc = 0.0;
    for (std::uint64_t i = 0; i < num_noise; ++i) {
        const int u = rng.bit();
        const double n = sys.sigma * rng.normal();
        acc += std::abs(irf_map(sys, x, u, n) - irf_map(sys, y, u, n));
    }
    return acc / static_cast<double>(num_noise);
}

double empirical_contraction(const DiscreteSystem& sys, std::uint64_t num_pairs,
                             std::uint64_t num_noise, Rng& rng,
                             EmpiricalContractionDiag* diag) {
    sys.validate();
    if (num_pairs < 1)
        throw Error(ErrorCode::InvalidParam, "empirical_contraction: num_pairs must be >= 1");
    const Interval s = state_space_bounds(sys);
    const double span = s.hi - s.lo;

    double max_ratio = 0.0;
    double max_dev = 0.0;
    for (std::uint64_t p = 0; p < num_pairs; ++p) {
        double x, y;
        do {
            x = s.lo + span * rng.uniform();
            y = s.lo + span * rng.uniform();
        } while (std::abs(x - y) < 1e-6);
        if (x < y) std::swap(x, y);

        const double closed = pair_contraction_closed(sys, x, y);
        max_ratio = std::max(max_ratio, closed / (x - y));

        if (diag && num_noise >= 1) {
            double acc = 0.0, ss = 0.0;
            for (std::uint64_t i = 0; i < num_noise; ++i) {
                const int u = rng.bit();
                const double n = sys.sigma * rng.normal();
                const double d = std::abs(irf_map(sys, x, u, n) - irf_map(sys, y, u, n));
                acc += d;
                ss += d * d;
            }
            const double m = acc / static_cast<double>(num_noise);
            const double var = std::max(0.0, ss / static_cast<double>(num_noise) - m * m);
            const double se = std::sqrt(var / static_cast<double>(num_noise));
            const double dev = std::abs(m - closed);
            max_dev = std::max(max_dev, se > 0.0 ? dev / se : (dev < 1e-12 ? 0.0 : 1e300));
        }
    }
    if (diag) diag->max_sigma_deviation = max_dev;
    return max_ratio;
}

ContractionReport full_report(const DiscreteSystem& sys, const Grid& grid,
                              std::uint64_t num_pairs, std::uint64_t num_noise,
                              std::uint64_t seed) {
    ContractionReport rep = sufficient_condition(sys);
    rep.numeric_sup_Fprime = numeric_sup_Fprime(sys, grid);
    rep.numeric_only_certificate =
        rep.branch == ContractionBranch::Unverified && rep.numeric_sup_Fprime < 1.0;
    if (num_pairs > 0) {
        Rng rng(seed, 0);
        rep.empirical_ratio = empirical_contraction(sys, num_pairs, num_noise, rng);
        rep.has_empirical_ratio = true;
    }
    return rep;
}

} // namespace osa
