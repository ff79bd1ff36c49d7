#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/engine.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

struct BenchPoint {
    EngineKind engine = EngineKind::pq;
    std::int64_t trips = 0;
    double network_km = 0.0;
    double dt_s = 0.0;
    double horizon_s = 0.0;
    int repetitions = 0;
    // Medians over the repetitions, warm-up run excluded.
    double t_setup_s = 0.0;   // sampling and sorting the demand
    double t_sim_s = 0.0;     // the engine itself
    double t_post_s = 0.0;    // travel times and TTTD
    double wall_time_s = 0.0; // median of the per-repetition totals
};

enum class TimestepRule {
    fixed,    // keep the template's dt
    inflow,   // dt = 1 / (e_bar L_N), no floor: one departure per step on average
};

struct SweepOptions {
    int repetitions = 5;
    TimestepRule dt_rule = TimestepRule::inflow;
    std::uint64_t seed = 1;
};

// Times one configuration: a discarded warm-up, then `repetitions` timed runs.
BenchPoint measure(EngineKind engine, const Scenario& scenario, const SampledDemand& demand,
                   const SweepOptions& options = {});

// For each I the template is flow-scaled so I / L_N stays at the template's
// value, which keeps every size in the same density regime.
std::vector<BenchPoint> sweep(EngineKind engine, std::span<const std::int64_t> trip_counts,
                              const Scenario& scenario_template, const SampledDemand& demand_template,
                              const SweepOptions& options = {});

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Slope of simulate-phase time against I. Needs >= 3 points over >= 2 decades.
double fit_slope(std::span<const BenchPoint> points);

} // namespace abbm
