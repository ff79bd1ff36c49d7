#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

enum class EngineKind { naive, pq };

EngineKind parse_engine(std::string_view name);
std::string_view to_string(EngineKind kind);

// theta(i) = X(i) + z(T(i)). Time-invariant once the trip has entered.
double characteristic_distance(const Trip& trip, double z_at_entry_km);

// z(T) for a trip admitted at step time t, traced back along the previous
// step's speed. Both engines admit trips through this so their thetas agree
// bit for bit.
double backdated_entry_distance(double z_now_km, double now_s, double depart_s, double v_prev_km_h);

struct CharacteristicDistance {
    double theta_km;
    std::int64_t trip_id;
};

// Binary min-heap of active trips keyed on theta, ties broken by trip id.
class ThetaQueue {
public:
    void push(CharacteristicDistance item);
    const CharacteristicDistance& top() const { return heap_.front(); }
    CharacteristicDistance pop();
    std::size_t size() const { return heap_.size(); }
    bool empty() const { return heap_.empty(); }
    void reserve(std::size_t n) { heap_.reserve(n); }

    bool satisfies_heap_property() const;
    // Unordered view of the stored items.
    std::span<const CharacteristicDistance> contents() const { return heap_; }

private:
    std::vector<CharacteristicDistance> heap_;
};

// Optional instrumentation for run_pq. Collecting it costs O(delta) per step
// for the m scan, so it is meant for tests and debugging only.
struct PqTrace {
    std::vector<double> popped_theta;
    std::vector<std::int64_t> popped_id;
    std::vector<std::size_t> heap_size;   // after each step
    std::vector<double> m_scan_km;        // sum of (theta - z) over the heap
    bool heap_property_held = true;
};

// Fixed-step reference engine: every step recomputes each active trip's
// remaining distance and scans all of them for completions.
SimOutput run_naive(const Scenario& scenario, const TripTable& trips);

// Priority-queue engine. Produces the same E, G, v and z series as run_naive.
SimOutput run_pq(const Scenario& scenario, const TripTable& trips, PqTrace* trace = nullptr);

SimOutput run_engine(EngineKind kind, const Scenario& scenario, const TripTable& trips);

} // namespace abbm
