#pragma once

#include "osa/errors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace osa {

// One plotted curve: simulation and/or prediction per SNR point.
struct MseCurveRow {
    double snr_db = 0.0;
    std::optional<double> sim_mse;
    std::optional<double> sim_stderr;
    std::optional<double> pred_mse;
    std::optional<std::string> regime;
};

struct MseCurve {
    std::vector<MseCurveRow> rows;

    // snr_db strictly increasing, every present mse in [0,1].
    void validate() const;
};

// Deterministic float formatting shared by all CSV output.
std::string format_double(double v);

} // namespace osa
