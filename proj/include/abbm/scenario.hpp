#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abbm/nfd.hpp"

namespace abbm {

// Supply side of a run. The network starts empty.
struct Scenario {
    double network_km = 1.0;   // L_N, total lane distance
    double horizon_s = 0.0;    // t_f
    double dt_s = 1.0;         // fixed step
    Nfd nfd = ExponentialNfd{50.0, 140.0};

    // Throws ValidationError naming the bad field.
    void validate() const;

    // K, with t_f rounded up to a whole number of steps.
    std::int64_t step_count() const;
    double step_time(std::int64_t k) const { return static_cast<double>(k) * dt_s; }
};

// Per-step state of a run. Row k describes time k*dt after admissions and
// completions at that instant; z[k] is the characteristic distance reached at
// that time and v[k] the speed applied over [k dt, (k+1) dt).
struct StepSeries {
    std::vector<double> t_s;
    std::vector<std::int64_t> started;    // E
    std::vector<std::int64_t> finished;   // G
    std::vector<std::int64_t> active;     // delta = E - G
    std::vector<double> rho_veh_km;
    std::vector<double> v_km_h;
    std::vector<double> z_km;
    std::vector<double> m_km;             // total remaining distance of active trips

    std::size_t size() const { return t_s.size(); }
    void reserve(std::size_t n);
};

struct TripOutcome {
    std::int64_t id = 0;
    double depart_time_s = 0.0;
    double distance_km = 0.0;
    double theta_km = 0.0;                          // characteristic trip distance
    std::optional<std::int64_t> completion_step;    // none if still active at t_f
};

struct SimOutput {
    double dt_s = 0.0;
    double u_f_km_h = 0.0;
    StepSeries steps;
    std::vector<TripOutcome> trips;   // indexed by id - 1
};

} // namespace abbm
