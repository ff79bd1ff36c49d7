#pragma once

#include <vector>

#include "abbm/demand.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

struct ContinuumDemand {
    InflowProfile inflow;            // e(t), veh/s
    DistanceDistribution distance;   // survival function and mean trip distance
};

struct ContinuumState {
    double delta = 0.0;   // active trips
    double m_km = 0.0;    // total remaining distance (M-model only)
};

// Row k is the state at time k*dt. Inflow over [(k-1) dt, k dt) is booked at
// row k, which is when the agent engines admit those departures.
struct ContinuumOutput {
    std::vector<double> t_s;
    std::vector<double> delta;
    std::vector<double> v_km_h;
    std::vector<double> z_km;
    std::vector<double> m_km;   // empty except for the M-model

    std::size_t size() const { return t_s.size(); }
};

// Vickrey's ODE: d(delta)/dt = e - delta / D * V(delta / L_N), explicit Euler.
ContinuumOutput solve_vbm(const Scenario& scenario, const ContinuumDemand& demand,
                          ContinuumState initial = {});

// Generalized bathtub model in integral form. O(K^2); for validation only.
ContinuumOutput solve_gbm(const Scenario& scenario, const ContinuumDemand& demand);

// M-model: VBM outflow corrected by the average remaining distance m/delta.
ContinuumOutput solve_mm(const Scenario& scenario, const ContinuumDemand& demand, double alpha,
                         double d_star_km, ContinuumState initial = {});

struct DensityGap {
    double sup_abs_veh_km = 0.0;   // max over steps of |rho_agents - rho_continuum|
    double peak_veh_km = 0.0;      // peak continuum density
    double relative = 0.0;         // sup_abs / peak (0 when both are empty)
};

// Compares an agent run and a continuum run on the same time grid.
DensityGap density_gap(const StepSeries& agents, const ContinuumOutput& continuum, double network_km);

} // namespace abbm
