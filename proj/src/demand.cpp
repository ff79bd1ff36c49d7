#include "abbm/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "abbm/errors.hpp"

namespace abbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

void validate_trips(std::span<const Trip> trips) {
    for (const Trip& t : trips) {
        if (!finite_nonneg(t.depart_time_s)) {
            throw ValidationError("depart_time_s",
                                  "trip " + std::to_string(t.id) + " has a negative or non-finite departure");
        }
        if (!finite_pos(t.distance_km)) {
            throw ValidationError("distance_km",
                                  "trip " + std::to_string(t.id) + " has a non-positive distance");
        }
    }
}

void validate_rate_pieces(const std::vector<RatePiece>& pieces, double horizon_s) {
    if (pieces.empty()) throw ValidationError("rates", "at least one rate piece is required");
    if (!finite_nonneg(pieces.front().t_start_s)) throw ValidationError("rates", "breakpoints must be >= 0");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!finite_nonneg(pieces[i].rate_veh_s)) throw ValidationError("rates", "rates must be >= 0");
        if (i > 0 && !(pieces[i].t_start_s > pieces[i - 1].t_start_s)) {
            throw ValidationError("rates", "breakpoints must be strictly increasing");
        }
    }
    if (!std::isfinite(horizon_s) || !(horizon_s > pieces.back().t_start_s)) {
        throw ValidationError("horizon_s", "must exceed the last rate breakpoint");
    }
}

// Rate-weighted length of each piece: the relative number of departures.
std::vector<double> piece_weights(const std::vector<RatePiece>& pieces, double horizon_s) {
    std::vector<double> w(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double end = i + 1 < pieces.size() ? pieces[i + 1].t_start_s : horizon_s;
        w[i] = pieces[i].rate_veh_s * (end - pieces[i].t_start_s);
    }
    return w;
}

double piece_end(const std::vector<RatePiece>& pieces, std::size_t i, double horizon_s) {
    return i + 1 < pieces.size() ? pieces[i + 1].t_start_s : horizon_s;
}

// Largest-remainder apportionment of `total` departures over the pieces.
std::vector<std::int64_t> apportion(const std::vector<double>& weights, std::int64_t total) {
    std::vector<std::int64_t> counts(weights.size(), 0);
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total == 0 || sum <= 0.0) return counts;
    std::vector<double> remainder(weights.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        counts[i] = static_cast<std::int64_t>(std::floor(exact));
        remainder[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        if (weights[order[k]] > 0.0) {
            ++counts[order[k]];
            ++assigned;
        }
    }
    return counts;
}

std::vector<double> deterministic_departures(const PiecewiseConstantRate& p, std::int64_t population) {
    const auto counts = apportion(piece_weights(p.pieces, p.horizon_s), population);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(population));
    for (std::size_t i = 0; i < p.pieces.size(); ++i) {
        const double start = p.pieces[i].t_start_s;
        const double span = piece_end(p.pieces, i, p.horizon_s) - start;
        const auto n = counts[i];
        for (std::int64_t j = 0; j < n; ++j) {
            times.push_back(start + (static_cast<double>(j) + 0.5) * span / static_cast<double>(n));
        }
    }
    return times;
}

std::vector<double> poisson_departures(const PoissonProcess& p, std::int64_t population,
                                       std::mt19937_64& rng) {
    const auto weights = piece_weights(p.pieces, p.horizon_s);
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> times;
    if (population == 0 || total_weight <= 0.0) return times;
    const double scale = static_cast<double>(population) / total_weight;
    for (std::size_t i = 0; i < p.pieces.size(); ++i) {
        const double rate = p.pieces[i].rate_veh_s * scale;
        if (rate <= 0.0) continue;
        const double end = piece_end(p.pieces, i, p.horizon_s);
        std::exponential_distribution<double> gap(rate);
        for (double t = p.pieces[i].t_start_s + gap(rng); t < end; t += gap(rng)) {
            times.push_back(t);
        }
    }
    return times;
}

} // namespace

// --- TripTable ----------------------------------------------------------------

TripTable TripTable::from_sorted(std::vector<Trip> trips) {
    validate_trips(trips);
    for (std::size_t i = 0; i < trips.size(); ++i) {
        if (trips[i].id != static_cast<std::int64_t>(i) + 1) {
            throw ValidationError("id", "trip ids must run 1..I in table order");
        }
        if (i > 0 && trips[i].depart_time_s < trips[i - 1].depart_time_s) {
            throw ValidationError("depart_time_s", "trips must be sorted by departure time");
        }
    }
    return TripTable(std::move(trips));
}

double TripTable::total_distance_km() const {
    double sum = 0.0;
    for (const Trip& t : trips_) sum += t.distance_km;
    return sum;
}

TripTable sort_by_departure(std::vector<Trip> trips) {
    validate_trips(trips);
    std::stable_sort(trips.begin(), trips.end(),
                     [](const Trip& a, const Trip& b) { return a.depart_time_s < b.depart_time_s; });
    for (std::size_t i = 0; i < trips.size(); ++i) trips[i].id = static_cast<std::int64_t>(i) + 1;
    return TripTable(std::move(trips));
}

// --- distance shapes ------------------------------------------------------------

double shape_mean_km(const DistanceShape& shape) {
    return std::visit(overloaded{
                          [](const NegExp& d) { return d.mean_km; },
                          [](const Constant& d) { return d.d_km; },
                          [](const LogNormal& d) { return std::exp(d.mu_log + 0.5 * d.sigma_log * d.sigma_log); },
                          [](const DiscreteTable& d) {
                              double wsum = 0.0, xsum = 0.0;
                              for (auto [x, w] : d.entries) {
                                  wsum += w;
                                  xsum += w * x;
                              }
                              return xsum / wsum;
                          },
                      },
                      shape);
}

double shape_survival(const DistanceShape& shape, double x) {
    if (x < 0.0) return 1.0;
    return std::visit(overloaded{
                          [x](const NegExp& d) { return std::exp(-x / d.mean_km); },
                          [x](const Constant& d) { return x < d.d_km ? 1.0 : 0.0; },
                          [x](const LogNormal& d) {
                              if (x <= 0.0) return 1.0;
                              return 0.5 * std::erfc((std::log(x) - d.mu_log) / (d.sigma_log * std::sqrt(2.0)));
                          },
                          [x](const DiscreteTable& d) {
                              double wsum = 0.0, above = 0.0;
                              for (auto [xi, w] : d.entries) {
                                  wsum += w;
                                  if (xi > x) above += w;
                              }
                              return above / wsum;
                          },
                      },
                      shape);
}

DistanceShape scale_shape(const DistanceShape& shape, double r) {
    return std::visit(overloaded{
                          [r](const NegExp& d) -> DistanceShape { return NegExp{d.mean_km * r}; },
                          [r](const Constant& d) -> DistanceShape { return Constant{d.d_km * r}; },
                          [r](const LogNormal& d) -> DistanceShape {
                              return LogNormal{d.mu_log + std::log(r), d.sigma_log};
                          },
                          [r](const DiscreteTable& d) -> DistanceShape {
                              DiscreteTable out = d;
                              for (auto& e : out.entries) e.first *= r;
                              return out;
                          },
                      },
                      shape);
}

// --- DistanceDistribution -------------------------------------------------------

DistanceDistribution::DistanceDistribution(DistanceShape shape) : pieces_{{0.0, std::move(shape)}} {}

DistanceDistribution DistanceDistribution::piecewise(std::vector<Piece> pieces) {
    if (pieces.empty()) throw ValidationError("distance", "piecewise distribution needs at least one piece");
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (!(pieces[i].t_start_s > pieces[i - 1].t_start_s)) {
            throw ValidationError("distance", "piecewise breakpoints must be strictly increasing");
        }
    }
    return DistanceDistribution(std::move(pieces));
}

const DistanceShape& DistanceDistribution::at(double t_s) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t_s,
                               [](double t, const Piece& p) { return t < p.t_start_s; });
    if (it == pieces_.begin()) return pieces_.front().shape;
    return std::prev(it)->shape;
}

double DistanceDistribution::sample(double t_s, std::mt19937_64& rng) const {
    return std::visit(overloaded{
                          [&](const NegExp& d) { return std::exponential_distribution<double>(1.0 / d.mean_km)(rng); },
                          [](const Constant& d) { return d.d_km; },
                          [&](const LogNormal& d) {
                              return std::lognormal_distribution<double>(d.mu_log, d.sigma_log)(rng);
                          },
                          [&](const DiscreteTable& d) {
                              std::vector<double> w;
                              w.reserve(d.entries.size());
                              for (auto [x, wt] : d.entries) w.push_back(wt);
                              std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
                              return d.entries[pick(rng)].first;
                          },
                      },
                      at(t_s));
}

DistanceDistribution DistanceDistribution::scaled(double r) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back({p.t_start_s, scale_shape(p.shape, r)});
    return DistanceDistribution(std::move(out));
}

// --- InflowProfile ----------------------------------------------------------------

InflowProfile::InflowProfile(std::vector<RatePiece> pieces, double horizon_s)
    : pieces_(std::move(pieces)), horizon_s_(horizon_s) {
    validate_rate_pieces(pieces_, horizon_s_);
}

double InflowProfile::rate(double t_s) const {
    if (pieces_.empty() || t_s < pieces_.front().t_start_s || t_s >= horizon_s_) return 0.0;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t_s,
                               [](double t, const RatePiece& p) { return t < p.t_start_s; });
    return std::prev(it)->rate_veh_s;
}

double InflowProfile::arrivals(double a_s, double b_s) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const double lo = std::max(a_s, pieces_[i].t_start_s);
        const double hi = std::min(b_s, piece_end(pieces_, i, horizon_s_));
        if (hi > lo) sum += pieces_[i].rate_veh_s * (hi - lo);
    }
    return sum;
}

double InflowProfile::total() const {
    if (pieces_.empty()) return 0.0;
    return arrivals(pieces_.front().t_start_s, horizon_s_);
}

// --- demand ------------------------------------------------------------------

std::int64_t implied_population(const DepartureProcess& process) {
    return std::visit(overloaded{
                          [](const ExplicitTimes& e) { return static_cast<std::int64_t>(e.times_s.size()); },
                          [](const auto& rated) {
                              const auto w = piece_weights(rated.pieces, rated.horizon_s);
                              return static_cast<std::int64_t>(std::llround(std::accumulate(w.begin(), w.end(), 0.0)));
                          },
                      },
                      process);
}

void validate(const DistanceDistribution& dist) {
    for (const auto& piece : dist.pieces()) {
        std::visit(overloaded{
                       [](const NegExp& d) {
                           if (!finite_pos(d.mean_km)) throw ValidationError("mean_km", "must be > 0");
                       },
                       [](const Constant& d) {
                           if (!finite_pos(d.d_km)) throw ValidationError("d_km", "must be > 0");
                       },
                       [](const LogNormal& d) {
                           if (!std::isfinite(d.mu_log)) throw ValidationError("mu_log", "must be finite");
                           if (!finite_pos(d.sigma_log)) throw ValidationError("sigma_log", "must be > 0");
                       },
                       [](const DiscreteTable& d) {
                           if (d.entries.empty()) throw ValidationError("table", "needs at least one entry");
                           for (auto [x, w] : d.entries) {
                               if (!finite_pos(x)) throw ValidationError("table", "distances must be > 0");
                               if (!finite_pos(w)) throw ValidationError("table", "weights must be > 0");
                           }
                       },
                   },
                   piece.shape);
    }
}

void validate(const DepartureProcess& process) {
    std::visit(overloaded{
                   [](const ExplicitTimes& e) {
                       for (std::size_t i = 0; i < e.times_s.size(); ++i) {
                           if (!finite_nonneg(e.times_s[i])) throw ValidationError("times", "must be >= 0");
                           if (i > 0 && e.times_s[i] < e.times_s[i - 1]) {
                               throw ValidationError("times", "explicit departure times must be sorted");
                           }
                       }
                   },
                   [](const auto& rated) { validate_rate_pieces(rated.pieces, rated.horizon_s); },
               },
               process);
}

void validate(const DemandSpec& spec) {
    if (const auto* sampled = std::get_if<SampledDemand>(&spec)) {
        if (sampled->population < 0) throw ValidationError("population", "must be >= 0");
        validate(sampled->departure);
        validate(sampled->distance);
        if (const auto* e = std::get_if<ExplicitTimes>(&sampled->departure)) {
            if (static_cast<std::int64_t>(e->times_s.size()) != sampled->population) {
                throw ValidationError("population", "must equal the number of explicit departure times");
            }
        } else if (sampled->population > 0) {
            const auto& pieces = std::holds_alternative<PiecewiseConstantRate>(sampled->departure)
                                     ? std::get<PiecewiseConstantRate>(sampled->departure).pieces
                                     : std::get<PoissonProcess>(sampled->departure).pieces;
            const bool any_rate = std::any_of(pieces.begin(), pieces.end(),
                                              [](const RatePiece& p) { return p.rate_veh_s > 0.0; });
            if (!any_rate) throw ValidationError("rates", "a positive population needs a positive rate somewhere");
        }
    }
}

InflowProfile inflow_profile(const SampledDemand& demand) {
    const auto scaled = [&](const std::vector<RatePiece>& pieces, double horizon) {
        const auto w = piece_weights(pieces, horizon);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<RatePiece> out = pieces;
        const double factor = total > 0.0 ? static_cast<double>(demand.population) / total : 0.0;
        for (auto& p : out) p.rate_veh_s *= factor;
        return InflowProfile(std::move(out), horizon);
    };
    return std::visit(overloaded{
                          [](const ExplicitTimes&) -> InflowProfile {
                              throw ValidationError("departure", "explicit departure times have no rate profile");
                          },
                          [&](const PiecewiseConstantRate& p) { return scaled(p.pieces, p.horizon_s); },
                          [&](const PoissonProcess& p) { return scaled(p.pieces, p.horizon_s); },
                      },
                      demand.departure);
}

TripTable sample_trips(const DemandSpec& spec, std::uint64_t seed) {
    validate(spec);
    if (const auto* explicit_demand = std::get_if<ExplicitDemand>(&spec)) {
        return explicit_demand->trips;
    }
    const auto& sampled = std::get<SampledDemand>(spec);
    std::mt19937_64 rng(seed);
    std::vector<double> times = std::visit(
        overloaded{
            [](const ExplicitTimes& e) { return e.times_s; },
            [&](const PiecewiseConstantRate& p) { return deterministic_departures(p, sampled.population); },
            [&](const PoissonProcess& p) { return poisson_departures(p, sampled.population, rng); },
        },
        sampled.departure);

    std::vector<Trip> trips;
    trips.reserve(times.size());
    for (double t : times) trips.push_back({0, t, sampled.distance.sample(t, rng)});
    return sort_by_departure(std::move(trips));
}

double average_inflow(std::int64_t trip_count, double network_km, double horizon_s) {
    if (!finite_pos(network_km)) throw ValidationError("L_N_km", "must be > 0");
    if (!finite_pos(horizon_s)) throw ValidationError("t_f_s", "must be > 0");
    if (trip_count < 0) throw ValidationError("I", "must be >= 0");
    return static_cast<double>(trip_count) / (network_km * horizon_s);
}

double suggested_timestep(double e_bar, double network_km) {
    if (!finite_pos(e_bar)) throw ValidationError("e_bar", "must be > 0");
    if (!finite_pos(network_km)) throw ValidationError("L_N_km", "must be > 0");
    return 1.0 / (e_bar * network_km);
}

double auto_timestep(std::int64_t trip_count, double network_km, double horizon_s, double floor_s) {
    const double e_bar = average_inflow(trip_count, network_km, horizon_s);
    if (e_bar <= 0.0) return horizon_s;
    return std::clamp(suggested_timestep(e_bar, network_km), std::min(floor_s, horizon_s), horizon_s);
}

} // namespace abbm
