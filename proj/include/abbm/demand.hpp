#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace abbm {

struct Trip {
    std::int64_t id = 0;
    double depart_time_s = 0.0;
    double distance_km = 0.0;

    friend bool operator==(const Trip&, const Trip&) = default;
};

// Trips sorted by departure time with ids 1..I in that order. The only ways to
// build one go through sort_by_departure or from_sorted, so the ordering
// invariant holds for every instance.
class TripTable {
public:
    TripTable() = default;

    // Accepts a table that is already sorted with ids 1..I; throws otherwise.
    static TripTable from_sorted(std::vector<Trip> trips);

    std::span<const Trip> trips() const { return trips_; }
    std::size_t size() const { return trips_.size(); }
    bool empty() const { return trips_.empty(); }
    const Trip& operator[](std::size_t i) const { return trips_[i]; }
    auto begin() const { return trips_.begin(); }
    auto end() const { return trips_.end(); }

    double total_distance_km() const;

    friend bool operator==(const TripTable&, const TripTable&) = default;

private:
    explicit TripTable(std::vector<Trip> trips) : trips_(std::move(trips)) {}
    friend TripTable sort_by_departure(std::vector<Trip> trips);

    std::vector<Trip> trips_;
};

// Stable sort on departure time; ids are reassigned 1..I afterwards.
TripTable sort_by_departure(std::vector<Trip> trips);

// --- trip distance distributions -------------------------------------------

struct NegExp {
    double mean_km;
};
struct Constant {
    double d_km;
};
struct LogNormal {
    double mu_log;
    double sigma_log;
};
struct DiscreteTable {
    std::vector<std::pair<double, double>> entries; // (distance_km, weight)
};

using DistanceShape = std::variant<NegExp, Constant, LogNormal, DiscreteTable>;

double shape_mean_km(const DistanceShape& shape);
// P(X > x). Strict, so that atoms at x count as already exhausted, matching
// the "remaining distance <= 0 completes" rule of the agent engines.
double shape_survival(const DistanceShape& shape, double x_km);
DistanceShape scale_shape(const DistanceShape& shape, double r);

// Conditional trip distance distribution given departure time. A single piece
// starting at t = 0 is the time-independent case.
class DistanceDistribution {
public:
    struct Piece {
        double t_start_s;
        DistanceShape shape;
    };

    DistanceDistribution(DistanceShape shape); // NOLINT: implicit on purpose
    DistanceDistribution(NegExp s) : DistanceDistribution(DistanceShape(s)) {} // NOLINT
    DistanceDistribution(Constant s) : DistanceDistribution(DistanceShape(s)) {} // NOLINT
    DistanceDistribution(LogNormal s) : DistanceDistribution(DistanceShape(s)) {} // NOLINT
    DistanceDistribution(DiscreteTable s) : DistanceDistribution(DistanceShape(std::move(s))) {} // NOLINT
    static DistanceDistribution piecewise(std::vector<Piece> pieces);

    const DistanceShape& at(double t_s) const;
    double mean_km(double t_s) const { return shape_mean_km(at(t_s)); }
    double survival(double t_s, double x_km) const { return shape_survival(at(t_s), x_km); }
    double sample(double t_s, std::mt19937_64& rng) const;

    bool time_independent() const { return pieces_.size() == 1; }
    std::span<const Piece> pieces() const { return pieces_; }
    DistanceDistribution scaled(double r) const;

private:
    explicit DistanceDistribution(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}
    std::vector<Piece> pieces_;
};

// --- departure processes ----------------------------------------------------

struct RatePiece {
    double t_start_s;
    double rate_veh_s;
};

struct ExplicitTimes {
    std::vector<double> times_s;
};
// Deterministic: departures equally spaced at sub-interval midpoints.
struct PiecewiseConstantRate {
    std::vector<RatePiece> pieces;
    double horizon_s;
};
// Stochastic: exponential inter-arrivals within each piece.
struct PoissonProcess {
    std::vector<RatePiece> pieces;
    double horizon_s;
};

using DepartureProcess = std::variant<ExplicitTimes, PiecewiseConstantRate, PoissonProcess>;

// Piecewise-constant trip initiation rate e(t) in veh/s, zero outside
// [pieces.front().t_start_s, horizon_s).
class InflowProfile {
public:
    InflowProfile() = default;
    InflowProfile(std::vector<RatePiece> pieces, double horizon_s);

    static InflowProfile constant(double rate_veh_s, double horizon_s) {
        return InflowProfile({{0.0, rate_veh_s}}, horizon_s);
    }
    static InflowProfile empty() { return {}; }

    double rate(double t_s) const;
    // Exact integral of e over [a, b).
    double arrivals(double a_s, double b_s) const;
    double total() const;
    std::span<const RatePiece> pieces() const { return pieces_; }
    double horizon_s() const { return horizon_s_; }

private:
    std::vector<RatePiece> pieces_;
    double horizon_s_ = 0.0;
};

// --- demand -------------------------------------------------------------

struct ExplicitDemand {
    TripTable trips;
};

// For rate processes the rates give the shape of the departure profile and
// population fixes its integral: e(t) = I * phi_T(t). Deterministic rates then
// yield exactly I trips; Poisson yields a Poisson(I) count.
struct SampledDemand {
    DepartureProcess departure;
    DistanceDistribution distance;
    std::int64_t population = 0;
};

using DemandSpec = std::variant<ExplicitDemand, SampledDemand>;

// Number of trips the departure process implies on its own (list length for
// explicit times, rounded integral of the rates otherwise).
std::int64_t implied_population(const DepartureProcess& process);

void validate(const DistanceDistribution& dist);
void validate(const DepartureProcess& process);
void validate(const DemandSpec& spec);

// The departure rate of a sampled rate-process demand, scaled to its population.
InflowProfile inflow_profile(const SampledDemand& demand);

TripTable sample_trips(const DemandSpec& spec, std::uint64_t seed);

// Average inflow per unit network length, veh/(km s).
double average_inflow(std::int64_t trip_count, double network_km, double horizon_s);

// Upper bound on the step that still resolves one departure on average.
double suggested_timestep(double e_bar, double network_km);

inline constexpr double default_timestep_floor_s = 1.0;

// suggested_timestep clamped into [floor_s, horizon_s].
double auto_timestep(std::int64_t trip_count, double network_km, double horizon_s,
                     double floor_s = default_timestep_floor_s);

} // namespace abbm
