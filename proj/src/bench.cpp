#include "abbm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "abbm/analysis.hpp"
#include "abbm/errors.hpp"

namespace abbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct Timings {
    double setup, sim, post;
};

Timings time_once(EngineKind engine, const Scenario& scenario, const SampledDemand& demand, std::uint64_t seed) {
    const auto t0 = Clock::now();
    const auto trips = sample_trips(DemandSpec{demand}, seed);
    const double setup = seconds_since(t0);

    const auto t1 = Clock::now();
    const auto out = run_engine(engine, scenario, trips);
    const double sim = seconds_since(t1);

    const auto t2 = Clock::now();
    const auto stats = tttd(travel_times(out, trips), default_histogram_bin_s);
    const double post = seconds_since(t2);
    if (stats.count + stats.uncompleted_count != static_cast<std::int64_t>(trips.size())) {
        throw std::logic_error("bench: trip accounting mismatch");
    }
    return {setup, sim, post};
}

} // namespace

BenchPoint measure(EngineKind engine, const Scenario& scenario, const SampledDemand& demand,
                   const SweepOptions& options) {
    if (options.repetitions < 5) throw ValidationError("repetitions", "need at least 5 timed repetitions");
    time_once(engine, scenario, demand, options.seed);

    std::vector<double> setup, sim, post, total;
    for (int r = 0; r < options.repetitions; ++r) {
        const auto t = time_once(engine, scenario, demand, options.seed);
        setup.push_back(t.setup);
        sim.push_back(t.sim);
        post.push_back(t.post);
        total.push_back(t.setup + t.sim + t.post);
    }
    BenchPoint p;
    p.engine = engine;
    p.trips = demand.population;
    p.network_km = scenario.network_km;
    p.dt_s = scenario.dt_s;
    p.horizon_s = scenario.horizon_s;
    p.repetitions = options.repetitions;
    p.t_setup_s = median(setup);
    p.t_sim_s = median(sim);
    p.t_post_s = median(post);
    p.wall_time_s = median(total);
    return p;
}

std::vector<BenchPoint> sweep(EngineKind engine, std::span<const std::int64_t> trip_counts,
                              const Scenario& scenario_template, const SampledDemand& demand_template,
                              const SweepOptions& options) {
    if (!std::is_sorted(trip_counts.begin(), trip_counts.end())) {
        throw ValidationError("sizes", "trip counts must be sorted ascending");
    }
    if (demand_template.population <= 0) throw ValidationError("population", "template population must be > 0");
    const double km_per_trip = scenario_template.network_km / static_cast<double>(demand_template.population);

    std::vector<BenchPoint> points;
    for (const auto n : trip_counts) {
        if (n <= 0) throw ValidationError("sizes", "trip counts must be positive");
        Scenario scenario = scenario_template;
        scenario.network_km = km_per_trip * static_cast<double>(n);
        if (options.dt_rule == TimestepRule::inflow) {
            const double e_bar = average_inflow(n, scenario.network_km, scenario.horizon_s);
            scenario.dt_s = std::min(suggested_timestep(e_bar, scenario.network_km), scenario.horizon_s);
        }
        SampledDemand demand = demand_template;
        demand.population = n;
        points.push_back(measure(engine, scenario, demand, options));
    }
    return points;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("points", "need at least two matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("points", "log-log fit needs positive values");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fit_slope(std::span<const BenchPoint> points) {
    if (points.size() < 3) throw ValidationError("points", "need at least 3 bench points");
    std::vector<double> x, y;
    for (const auto& p : points) {
        x.push_back(static_cast<double>(p.trips));
        y.push_back(p.t_sim_s);
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi < 100.0 * *lo) throw ValidationError("points", "trip counts must span at least two decades");
    return loglog_slope(x, y);
}

} // namespace abbm
