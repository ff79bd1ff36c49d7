#include "abbm/continuum.hpp"

#include <algorithm>
#include <cmath>

#include "abbm/errors.hpp"
#include "abbm/units.hpp"

namespace abbm {

namespace {

double constant_mean_distance(const ContinuumDemand& demand) {
    if (!demand.distance.time_independent()) {
        throw ValidationError("distance", "this solver needs a time-independent trip distance distribution");
    }
    return demand.distance.mean_km(0.0);
}

void validate_initial(const ContinuumState& s) {
    if (!(s.delta >= 0.0)) throw ValidationError("delta0", "must be >= 0");
    if (!(s.m_km >= 0.0)) throw ValidationError("m0_km", "must be >= 0");
}

// Shared Euler loop for VBM and the M-model. With alpha == 0 the correction
// factor is exactly 1, so the M-model reproduces VBM bit for bit.
ContinuumOutput integrate_bathtub(const Scenario& scenario, const ContinuumDemand& demand,
                                  ContinuumState state, bool track_m, double alpha, double d_star) {
    scenario.validate();
    validate(demand.distance);
    validate_initial(state);
    const double mean_distance = constant_mean_distance(demand);
    const auto steps = scenario.step_count();
    const double dt = scenario.dt_s;

    ContinuumOutput out;
    const auto rows = static_cast<std::size_t>(steps) + 1;
    out.t_s.reserve(rows);
    out.delta.reserve(rows);
    out.v_km_h.reserve(rows);
    out.z_km.reserve(rows);
    if (track_m) out.m_km.reserve(rows);

    double z = 0.0;
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = scenario.step_time(k);
        const double arrivals = demand.inflow.arrivals(t - dt, t);

        const double v_before = scenario.nfd.speed(state.delta / scenario.network_km);
        double outflow = 0.0;   // veh/s
        if (state.delta > 0.0) {
            const double correction = 1.0 - alpha * (state.m_km / (state.delta * d_star) - 1.0);
            outflow = state.delta / mean_distance * v_before * correction / units::seconds_per_hour;
        }
        const double travelled = units::km_travelled(state.delta * v_before, dt);
        state.delta = std::max(0.0, state.delta + arrivals - outflow * dt);
        if (track_m) state.m_km = std::max(0.0, state.m_km + arrivals * mean_distance - travelled);

        const double v = scenario.nfd.speed(state.delta / scenario.network_km);
        out.t_s.push_back(t);
        out.delta.push_back(state.delta);
        out.v_km_h.push_back(v);
        out.z_km.push_back(z);
        if (track_m) out.m_km.push_back(state.m_km);
        z += units::km_travelled(v, dt);
    }
    return out;
}

} // namespace

ContinuumOutput solve_vbm(const Scenario& scenario, const ContinuumDemand& demand, ContinuumState initial) {
    return integrate_bathtub(scenario, demand, initial, false, 0.0, 1.0);
}

ContinuumOutput solve_mm(const Scenario& scenario, const ContinuumDemand& demand, double alpha,
                         double d_star_km, ContinuumState initial) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw ValidationError("alpha", "must be >= 0");
    if (!std::isfinite(d_star_km) || !(d_star_km > 0.0)) throw ValidationError("d_star_km", "must be > 0");
    return integrate_bathtub(scenario, demand, initial, true, alpha, d_star_km);
}

ContinuumOutput solve_gbm(const Scenario& scenario, const ContinuumDemand& demand) {
    scenario.validate();
    validate(demand.distance);
    const auto steps = scenario.step_count();
    const double dt = scenario.dt_s;
    const auto rows = static_cast<std::size_t>(steps) + 1;

    ContinuumOutput out;
    out.t_s.reserve(rows);
    out.delta.reserve(rows);
    out.v_km_h.reserve(rows);
    out.z_km.reserve(rows);

    // Cohort j holds the arrivals over [t_j - dt, t_j). They entered while z
    // ran from z_{j-1} to z_j, so they are placed at the midpoint; at time t_k
    // Phi(t, z_k - entry) of them are still travelling.
    std::vector<double> cohort_size;
    std::vector<double> cohort_z;
    std::vector<double> cohort_t;
    cohort_size.reserve(rows);
    cohort_z.reserve(rows);
    cohort_t.reserve(rows);
    double z = 0.0;
    double z_prev = 0.0;
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = scenario.step_time(k);
        const double arrivals = demand.inflow.arrivals(t - dt, t);
        if (arrivals > 0.0) {
            cohort_size.push_back(arrivals);
            cohort_z.push_back(0.5 * (z_prev + z));
            cohort_t.push_back(std::max(0.0, t - 0.5 * dt));
        }

        double delta = 0.0;
        for (std::size_t j = 0; j < cohort_size.size(); ++j) {
            delta += cohort_size[j] * demand.distance.survival(cohort_t[j], z - cohort_z[j]);
        }
        const double v = scenario.nfd.speed(delta / scenario.network_km);
        out.t_s.push_back(t);
        out.delta.push_back(delta);
        out.v_km_h.push_back(v);
        out.z_km.push_back(z);
        z_prev = z;
        z += units::km_travelled(v, dt);
    }
    return out;
}

DensityGap density_gap(const StepSeries& agents, const ContinuumOutput& continuum, double network_km) {
    if (agents.size() != continuum.size()) throw ValidationError("series", "agent and continuum grids differ in length");
    DensityGap gap;
    for (std::size_t k = 0; k < agents.size(); ++k) {
        const double rho_c = continuum.delta[k] / network_km;
        gap.sup_abs_veh_km = std::max(gap.sup_abs_veh_km, std::abs(agents.rho_veh_km[k] - rho_c));
        gap.peak_veh_km = std::max(gap.peak_veh_km, rho_c);
    }
    if (gap.peak_veh_km > 0.0) gap.relative = gap.sup_abs_veh_km / gap.peak_veh_km;
    return gap;
}

} // namespace abbm
