#include <algorithm>

#include "engine_common.hpp"

namespace abbm {

namespace {

// Heap order for std::*_heap: true when a should come out after b.
bool later(const CharacteristicDistance& a, const CharacteristicDistance& b) {
    if (a.theta_km != b.theta_km) return a.theta_km > b.theta_km;
    return a.trip_id > b.trip_id;
}

} // namespace

void ThetaQueue::push(CharacteristicDistance item) {
    heap_.push_back(item);
    std::push_heap(heap_.begin(), heap_.end(), later);
}

CharacteristicDistance ThetaQueue::pop() {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    const auto item = heap_.back();
    heap_.pop_back();
    return item;
}

bool ThetaQueue::satisfies_heap_property() const { return std::is_heap(heap_.begin(), heap_.end(), later); }

SimOutput run_pq(const Scenario& scenario, const TripTable& trips, PqTrace* trace) {
    detail::validate_run_inputs(scenario, trips);
    SimOutput out = detail::start_output(scenario, trips);

    ThetaQueue queue;
    const auto steps = scenario.step_count();
    const auto all = trips.trips();
    std::size_t cursor = 0;
    std::int64_t finished = 0;
    double z = 0.0;
    double v_prev = scenario.nfd.free_flow_speed();
    double remaining = 0.0;   // m, maintained incrementally

    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = scenario.step_time(k);

        for (; cursor < all.size() && all[cursor].depart_time_s <= t; ++cursor) {
            const Trip& trip = all[cursor];
            const double theta =
                characteristic_distance(trip, backdated_entry_distance(z, t, trip.depart_time_s, v_prev));
            out.trips[cursor].theta_km = theta;
            queue.push({theta, trip.id});
            remaining += theta - z;
        }

        while (!queue.empty() && queue.top().theta_km <= z) {
            const auto done = queue.pop();
            out.trips[static_cast<std::size_t>(done.trip_id - 1)].completion_step = k;
            ++finished;
            remaining -= done.theta_km - z;   // removes the overshoot too
            if (trace) {
                trace->popped_theta.push_back(done.theta_km);
                trace->popped_id.push_back(done.trip_id);
            }
        }

        const auto started = static_cast<std::int64_t>(cursor);
        const auto active = started - finished;
        if (active == 0) remaining = 0.0;
        const double rho = static_cast<double>(active) / scenario.network_km;
        const double v = scenario.nfd.speed(rho);
        detail::record_step(out.steps, t, started, finished, rho, v, z, remaining);

        if (trace) {
            trace->heap_size.push_back(queue.size());
            double scan = 0.0;
            for (const auto& item : queue.contents()) scan += item.theta_km - z;
            trace->m_scan_km.push_back(scan);
            if (!queue.satisfies_heap_property()) trace->heap_property_held = false;
        }

        const double step_km = units::km_travelled(v, scenario.dt_s);
        remaining -= static_cast<double>(active) * step_km;
        v_prev = v;
        z += step_km;
    }
    return out;
}

} // namespace abbm
