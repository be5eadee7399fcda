#include "osa/curve.hpp"

#include <cstdio>

namespace osa {

void MseCurve::validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const MseCurveRow& r = rows[i];
        if (i > 0 && !(rows[i - 1].snr_db < r.snr_db))
            throw Error(ErrorCode::InvalidParam, "mse curve: snr_db must be strictly increasing");
        for (const auto& v : {r.sim_mse, r.pred_mse})
            if (v && !(*v >= 0.0 && *v <= 1.0))
                throw Error(ErrorCode::InvalidParam, "mse curve: mse outside [0,1]");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace osa
