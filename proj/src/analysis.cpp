#include "abbm/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "abbm/errors.hpp"
#include "abbm/units.hpp"

namespace abbm {

namespace {

void require_nondecreasing(std::span<const double> z) {
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (z[k] < z[k - 1]) throw ValidationError("z_series", "must be non-decreasing");
    }
}

std::optional<double> completion_time_unchecked(double theta, std::span<const double> z, double dt,
                                                std::span<const double> v) {
    if (z.empty() || theta > z.back()) return std::nullopt;
    const auto it = std::lower_bound(z.begin(), z.end(), theta);
    const auto k = static_cast<std::size_t>(std::distance(z.begin(), it));
    // Grid hits are returned exactly; this also covers a stalled z (v = 0),
    // where the first instant z reaches theta is the answer.
    if (*it == theta) return static_cast<double>(k) * dt;
    if (k == 0) return 0.0;
    const double t_prev = static_cast<double>(k - 1) * dt;
    // z[k-1] < theta <= z[k], so the speed on this segment is positive.
    return t_prev + units::seconds_to_cover(theta - z[k - 1], v[k - 1]);
}

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    if (xs.empty()) return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

} // namespace

std::optional<double> completion_time(double theta_km, std::span<const double> z_km, double dt_s,
                                      std::span<const double> v_km_h) {
    if (!(dt_s > 0.0)) throw ValidationError("dt_s", "must be > 0");
    if (v_km_h.size() != z_km.size()) throw ValidationError("v_series", "must match z_series in length");
    require_nondecreasing(z_km);
    return completion_time_unchecked(theta_km, z_km, dt_s, v_km_h);
}

double z_at(double t_s, std::span<const double> z_km, double dt_s, std::span<const double> v_km_h) {
    if (z_km.empty()) return 0.0;
    const double last_t = static_cast<double>(z_km.size() - 1) * dt_s;
    if (t_s >= last_t) return z_km.back();
    if (t_s <= 0.0) return z_km.front();
    const auto k = static_cast<std::size_t>(std::floor(t_s / dt_s));
    return z_km[k] + units::km_travelled(v_km_h[k], t_s - static_cast<double>(k) * dt_s);
}

std::vector<TravelRecord> travel_times(const SimOutput& output, const TripTable& trips) {
    if (output.trips.size() != trips.size()) throw ValidationError("trips", "output was produced from another trip table");
    for (std::size_t i = 0; i < trips.size(); ++i) {
        const auto& o = output.trips[i];
        if (o.id != trips[i].id || o.depart_time_s != trips[i].depart_time_s || o.distance_km != trips[i].distance_km) {
            throw ValidationError("trips", "output was produced from another trip table");
        }
    }
    const auto& z = output.steps.z_km;
    const auto& v = output.steps.v_km_h;
    require_nondecreasing(z);

    std::vector<TravelRecord> records;
    records.reserve(trips.size());
    for (const auto& o : output.trips) {
        TravelRecord r{o.id, o.depart_time_s, std::nullopt, std::nullopt, o.distance_km, o.theta_km};
        if (o.completion_step) {
            r.completion_time_s = completion_time_unchecked(o.theta_km, z, output.dt_s, v);
            if (r.completion_time_s) r.travel_time_s = *r.completion_time_s - o.depart_time_s;
        }
        records.push_back(r);
    }
    return records;
}

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TTTDStats tttd(std::span<const TravelRecord> records, double bin_width_s) {
    if (!(bin_width_s > 0.0)) throw ValidationError("bin_width_s", "must be > 0");
    std::vector<double> times;
    TTTDStats s;
    s.histogram.bin_width_s = bin_width_s;
    for (const auto& r : records) {
        if (r.travel_time_s) {
            times.push_back(*r.travel_time_s);
        } else {
            ++s.uncompleted_count;
        }
    }
    s.count = static_cast<std::int64_t>(times.size());
    if (times.empty()) return s;

    const auto m = moments(times);
    s.mean_s = m.mean;
    s.std_s = m.std;
    std::sort(times.begin(), times.end());
    s.p5 = percentile_sorted(times, 5);
    s.p25 = percentile_sorted(times, 25);
    s.p50 = percentile_sorted(times, 50);
    s.p75 = percentile_sorted(times, 75);
    s.p95 = percentile_sorted(times, 95);

    s.histogram.counts.assign(static_cast<std::size_t>(std::floor(times.back() / bin_width_s)) + 1, 0);
    for (double t : times) ++s.histogram.counts[static_cast<std::size_t>(std::floor(std::max(t, 0.0) / bin_width_s))];
    return s;
}

BatchStats run_batch(const Scenario& scenario, const DemandSpec& spec, std::int64_t n_runs, std::uint64_t base_seed,
                     unsigned workers, double bin_width_s) {
    if (n_runs < 1) throw ValidationError("runs", "must be >= 1");
    if (std::holds_alternative<ExplicitDemand>(spec) && n_runs > 1) {
        throw ValidationError("runs", "explicit (deterministic) demand needs exactly one run");
    }
    if (!(bin_width_s > 0.0)) throw ValidationError("bin_width_s", "must be > 0");
    scenario.validate();
    validate(spec);

    struct RunResult {
        std::vector<double> delta;
        std::vector<double> v;
        std::vector<TravelRecord> records;
    };
    const auto n = static_cast<std::size_t>(n_runs);
    std::vector<RunResult> results(n);
    std::vector<std::exception_ptr> errors(n);

    BatchStats out;
    out.runs = n_runs;
    for (std::size_t i = 0; i < n; ++i) out.seeds.push_back(base_seed ^ static_cast<std::uint64_t>(i));

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const auto trips = sample_trips(spec, out.seeds[i]);
                const auto sim = run_pq(scenario, trips);
                auto& r = results[i];
                r.delta.assign(sim.steps.active.begin(), sim.steps.active.end());
                r.v = sim.steps.v_km_h;
                r.records = travel_times(sim, trips);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const auto rows = results.front().delta.size();
    for (std::size_t k = 0; k < rows; ++k) out.t_s.push_back(scenario.step_time(static_cast<std::int64_t>(k)));
    std::vector<double> column(n);
    const auto reduce = [&](auto member, std::vector<double>& mean, std::vector<double>& sd) {
        mean.resize(rows);
        sd.resize(rows);
        for (std::size_t k = 0; k < rows; ++k) {
            for (std::size_t i = 0; i < n; ++i) column[i] = (results[i].*member)[k];
            const auto m = moments(column);
            mean[k] = m.mean;
            sd[k] = m.std;
        }
    };
    reduce(&RunResult::delta, out.mean_delta, out.std_delta);
    reduce(&RunResult::v, out.mean_v, out.std_v);

    std::vector<TravelRecord> pooled;
    for (auto& r : results) pooled.insert(pooled.end(), r.records.begin(), r.records.end());
    out.pooled = tttd(pooled, bin_width_s);
    return out;
}

} // namespace abbm
