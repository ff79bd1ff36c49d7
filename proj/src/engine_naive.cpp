#include <stdexcept>
#include <string>
#include <vector>

#include "engine_common.hpp"

namespace abbm {

EngineKind parse_engine(std::string_view name) {
    if (name == "naive") return EngineKind::naive;
    if (name == "pq") return EngineKind::pq;
    throw ValidationError("engine", "expected naive or pq, got '" + std::string(name) + "'");
}

std::string_view to_string(EngineKind kind) { return kind == EngineKind::naive ? "naive" : "pq"; }

double characteristic_distance(const Trip& trip, double z_at_entry_km) { return trip.distance_km + z_at_entry_km; }

double backdated_entry_distance(double z_now_km, double now_s, double depart_s, double v_prev_km_h) {
    return z_now_km - units::km_travelled(v_prev_km_h, now_s - depart_s);
}

SimOutput run_engine(EngineKind kind, const Scenario& scenario, const TripTable& trips) {
    return kind == EngineKind::naive ? run_naive(scenario, trips) : run_pq(scenario, trips);
}

SimOutput run_naive(const Scenario& scenario, const TripTable& trips) {
    detail::validate_run_inputs(scenario, trips);
    SimOutput out = detail::start_output(scenario, trips);

    struct Agent {
        double theta_km;
        std::int64_t id;
    };
    std::vector<Agent> agents;   // active trips in admission (= id) order

    const auto steps = scenario.step_count();
    const auto all = trips.trips();
    std::size_t cursor = 0;
    std::int64_t finished = 0;
    double z = 0.0;
    double v_prev = scenario.nfd.free_flow_speed();

    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = scenario.step_time(k);

        for (; cursor < all.size() && all[cursor].depart_time_s <= t; ++cursor) {
            const Trip& trip = all[cursor];
            const double theta =
                characteristic_distance(trip, backdated_entry_distance(z, t, trip.depart_time_s, v_prev));
            out.trips[cursor].theta_km = theta;
            agents.push_back({theta, trip.id});
        }

        // x(t,i) = X(i) + z(T(i)) - z(t) for every active trip; complete on x <= 0.
        double remaining = 0.0;
        std::size_t kept = 0;
        for (const Agent& a : agents) {
            const double x = a.theta_km - z;
            if (x <= 0.0) {
                out.trips[static_cast<std::size_t>(a.id - 1)].completion_step = k;
                ++finished;
            } else {
                remaining += x;
                agents[kept++] = a;
            }
        }
        agents.resize(kept);

        const auto started = static_cast<std::int64_t>(cursor);
        const double rho = static_cast<double>(started - finished) / scenario.network_km;
        const double v = scenario.nfd.speed(rho);
        detail::record_step(out.steps, t, started, finished, rho, v, z, remaining);

        v_prev = v;
        z += units::km_travelled(v, scenario.dt_s);
    }
    return out;
}

} // namespace abbm
