#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace osa {

// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorCode {
    InvalidParam,    // domain-type invariant violated
    NonPositiveW,    // discretization produced w <= 0 (b <= 0)
    OutOfDomain,     // point outside the grid / state space
    GridMismatch,    // binary operation on measures with different grids
    HorizonTooLarge, // exact tree oracle beyond its depth limit
    NotConverged,    // iteration hit max_iter before the tolerance
    ConfigError,     // config file / flag problem
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

class NotConverged : public Error {
  public:
    NotConverged(const std::string& what, double last_gap, std::uint64_t iterations)
        : Error(ErrorCode::NotConverged, what), last_gap_(last_gap), iterations_(iterations) {}
    double last_gap() const noexcept { return last_gap_; }
    std::uint64_t iterations() const noexcept { return iterations_; }

  private:
    double last_gap_;
    std::uint64_t iterations_;
};

} // namespace osa
