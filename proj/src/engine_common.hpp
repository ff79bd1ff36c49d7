#pragma once

#include "abbm/engine.hpp"
#include "abbm/errors.hpp"
#include "abbm/units.hpp"

namespace abbm::detail {

inline void validate_run_inputs(const Scenario& scenario, const TripTable& trips) {
    scenario.validate();
    if (!trips.empty() && trips.trips().back().depart_time_s > scenario.horizon_s) {
        throw ValidationError("depart_time_s", "trip departs after t_f");
    }
}

inline SimOutput start_output(const Scenario& scenario, const TripTable& trips) {
    SimOutput out;
    out.dt_s = scenario.dt_s;
    out.u_f_km_h = scenario.nfd.free_flow_speed();
    out.steps.reserve(static_cast<std::size_t>(scenario.step_count()) + 1);
    out.trips.reserve(trips.size());
    for (const Trip& t : trips) out.trips.push_back({t.id, t.depart_time_s, t.distance_km, 0.0, std::nullopt});
    return out;
}

inline void record_step(StepSeries& s, double t, std::int64_t e, std::int64_t g, double rho, double v,
                        double z, double m) {
    s.t_s.push_back(t);
    s.started.push_back(e);
    s.finished.push_back(g);
    s.active.push_back(e - g);
    s.rho_veh_km.push_back(rho);
    s.v_km_h.push_back(v);
    s.z_km.push_back(z);
    s.m_km.push_back(m);
}

} // namespace abbm::detail
