#include "osa/system.hpp"

#include <cmath>
#include <string>

namespace osa {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
    if (!ok) throw Error(code, msg);
}

} // namespace

void ContinuousSystem::validate() const {
    require(std::isfinite(a) && a < 0.0, ErrorCode::InvalidParam,
            "continuous system: a must be finite and < 0, got " + std::to_string(a));
    require(std::isfinite(b) && b > 0.0, ErrorCode::InvalidParam,
            "continuous system: b must be finite and > 0, got " + std::to_string(b));
    require(std::isfinite(c) && c != 0.0, ErrorCode::InvalidParam,
            "continuous system: c must be finite and nonzero");
    require(std::isfinite(tau) && tau > 0.0, ErrorCode::InvalidParam,
            "continuous system: tau must be finite and > 0, got " + std::to_string(tau));
    require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::InvalidParam,
            "continuous system: sigma must be finite and > 0, got " + std::to_string(sigma));
}

void DiscreteSystem::validate() const {
    require(std::isfinite(q) && q > 0.0 && q < 1.0, ErrorCode::InvalidParam,
            "discrete system: q must lie in (0,1), got " + std::to_string(q));
    require(std::isfinite(w) && w > 0.0, ErrorCode::NonPositiveW,
            "discrete system: w must be > 0, got " + std::to_string(w));
    require(std::isfinite(c) && c != 0.0, ErrorCode::InvalidParam,
            "discrete system: c must be finite and nonzero");
    require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::InvalidParam,
            "discrete system: sigma must be finite and > 0, got " + std::to_string(sigma));
}

DiscreteSystem discretize(const ContinuousSystem& sys) {
    sys.validate();
    DiscreteSystem d;
    d.q = std::exp(sys.tau * sys.a);
    d.w = -(sys.b / sys.a) * (1.0 - d.q);
    d.c = sys.c;
    d.sigma = sys.sigma;
    d.validate();
    return d;
}

double snr_db(const DiscreteSystem& sys) {
    return 10.0 * std::log10(sys.snr_ratio());
}

double sigma_for_snr(double c, double w, double target_db) {
    if (!(std::isfinite(c) && c != 0.0) || !(std::isfinite(w) && w > 0.0))
        throw Error(ErrorCode::InvalidParam, "sigma_for_snr: need nonzero c and w > 0");
    if (!std::isfinite(target_db))
        throw Error(ErrorCode::InvalidParam, "sigma_for_snr: target_db must be finite");
    return std::abs(c * w) / std::pow(10.0, target_db / 20.0);
}

double sigma_for_snr(const DiscreteSystem& sys, double target_db) {
    return sigma_for_snr(sys.c, sys.w, target_db);
}

DiscreteSystem with_sigma(DiscreteSystem sys, double sigma) {
    sys.sigma = sigma;
    sys.validate();
    return sys;
}

DiscreteSystem with_snr_db(DiscreteSystem sys, double db) {
    return with_sigma(sys, sigma_for_snr(sys.c, sys.w, db));
}

Interval state_space_bounds(const DiscreteSystem& sys) {
    sys.validate();
    const double r = sys.w / (1.0 - sys.q);
    return {-r, r};
}

} // namespace osa
