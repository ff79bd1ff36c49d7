#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/engine.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

struct TravelRecord {
    std::int64_t trip_id = 0;
    double depart_time_s = 0.0;
    std::optional<double> completion_time_s;
    std::optional<double> travel_time_s;
    double distance_km = 0.0;
    double theta_km = 0.0;
};

struct Histogram {
    double bin_width_s = 0.0;
    std::vector<std::int64_t> counts;   // bin i covers [i w, (i+1) w)

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct TTTDStats {
    std::int64_t count = 0;
    std::int64_t uncompleted_count = 0;
    double mean_s = 0.0;
    double std_s = 0.0;   // sample standard deviation
    double p5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
    Histogram histogram;

    friend bool operator==(const TTTDStats&, const TTTDStats&) = default;
};

struct BatchStats {
    std::int64_t runs = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> t_s;
    std::vector<double> mean_delta, std_delta;
    std::vector<double> mean_v, std_v;
    TTTDStats pooled;

    friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

// Exact first time z reaches theta, given that z is piecewise linear with
// slope v[k] on [k dt, (k+1) dt]. None if theta lies beyond the last sample.
std::optional<double> completion_time(double theta_km, std::span<const double> z_km, double dt_s,
                                      std::span<const double> v_km_h);

// z at an arbitrary time by the same piecewise-linear reading.
double z_at(double t_s, std::span<const double> z_km, double dt_s, std::span<const double> v_km_h);

std::vector<TravelRecord> travel_times(const SimOutput& output, const TripTable& trips);

TTTDStats tttd(std::span<const TravelRecord> records, double bin_width_s);

// Linear-interpolation percentile of an ascending sample, q in [0, 100].
double percentile_sorted(std::span<const double> sorted, double q);

inline constexpr double default_histogram_bin_s = 60.0;

// Monte Carlo over seeds base_seed ^ i. Runs may execute on `workers`
// threads; the reduction always walks runs in index order.
BatchStats run_batch(const Scenario& scenario, const DemandSpec& spec, std::int64_t n_runs,
                     std::uint64_t base_seed, unsigned workers = 0,
                     double bin_width_s = default_histogram_bin_s);

} // namespace abbm
