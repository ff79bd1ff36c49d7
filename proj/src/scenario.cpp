#include "abbm/scenario.hpp"

#include <cmath>

#include "abbm/errors.hpp"

namespace abbm {

void Scenario::validate() const {
    if (!std::isfinite(network_km) || !(network_km > 0.0)) throw ValidationError("L_N_km", "must be > 0");
    if (!std::isfinite(horizon_s) || !(horizon_s > 0.0)) throw ValidationError("t_f_s", "must be > 0");
    if (!std::isfinite(dt_s) || !(dt_s > 0.0)) throw ValidationError("dt_s", "must be > 0");
    if (dt_s > horizon_s) throw ValidationError("dt_s", "must not exceed t_f_s");
}

std::int64_t Scenario::step_count() const {
    // Guard against t_f/dt landing a hair above an integer through rounding.
    const double ratio = horizon_s / dt_s;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * nearest) return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(ratio));
}

void StepSeries::reserve(std::size_t n) {
    t_s.reserve(n);
    started.reserve(n);
    finished.reserve(n);
    active.reserve(n);
    rho_veh_km.reserve(n);
    v_km_h.reserve(n);
    z_km.reserve(n);
    m_km.reserve(n);
}

} // namespace abbm
