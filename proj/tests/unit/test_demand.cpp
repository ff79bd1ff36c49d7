#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "abbm/demand.hpp"
#include "abbm/errors.hpp"

using namespace abbm;

TEST_CASE("sort_by_departure orders, re-indexes and keeps ties stable") {
    const auto t = sort_by_departure({{7, 5.0, 1.0}, {9, 2.0, 3.0}});
    REQUIRE(t.size() == 2);
    CHECK(t[0] == Trip{1, 2.0, 3.0});
    CHECK(t[1] == Trip{2, 5.0, 1.0});

    CHECK(sort_by_departure({t.begin(), t.end()}) == t);

    const auto ties = sort_by_departure({{0, 1.0, 4.0}, {0, 1.0, 2.0}, {0, 0.5, 9.0}, {0, 1.0, 3.0}});
    CHECK(ties[1].distance_km == 4.0);
    CHECK(ties[2].distance_km == 2.0);
    CHECK(ties[3].distance_km == 3.0);
}

TEST_CASE("trip tables reject bad rows") {
    CHECK_THROWS_AS(sort_by_departure({{0, 1.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(sort_by_departure({{0, -1.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(TripTable::from_sorted({{1, 5.0, 1.0}, {2, 2.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(TripTable::from_sorted({{2, 1.0, 1.0}}), ValidationError);
    CHECK(TripTable::from_sorted({{1, 1.0, 1.0}, {2, 1.0, 2.0}}).size() == 2);
}

TEST_CASE("explicit demand samples to itself") {
    std::vector<Trip> raw;
    for (int i = 0; i < 10; ++i) raw.push_back({0, static_cast<double>((7 * i) % 10), 1.0 + i});
    const auto table = sort_by_departure(raw);
    CHECK(sample_trips(ExplicitDemand{table}, 3) == table);
}

TEST_CASE("deterministic rate places departures at sub-interval midpoints") {
    const SampledDemand d{PiecewiseConstantRate{{{0.0, 0.1}}, 200.0}, Constant{1.0}, 20};
    const auto t = sample_trips(d, 0);
    REQUIRE(t.size() == 20);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i].depart_time_s == doctest::Approx(5.0 + 10.0 * static_cast<double>(i)));
        CHECK(t[i].distance_km == 1.0);
    }
    CHECK(implied_population(d.departure) == 20);
}

TEST_CASE("deterministic piece counts follow the rate-weighted lengths") {
    const PiecewiseConstantRate p{{{0.0, 0.1}, {100.0, 0.3}, {200.0, 0.0}, {250.0, 0.05}}, 400.0};
    const auto t = sample_trips(SampledDemand{p, NegExp{1.0}, implied_population(p)}, 1);
    std::map<int, int> per_piece;
    for (const auto& trip : t) {
        const double s = trip.depart_time_s;
        per_piece[s < 100 ? 0 : s < 200 ? 1 : s < 250 ? 2 : 3]++;
    }
    CHECK(per_piece[0] == 10);
    CHECK(per_piece[1] == 30);
    CHECK(per_piece[2] == 0);
    CHECK(per_piece[3] == 8);   // 7.5 rounds up by largest remainder
    CHECK(t.size() == 48);
}

TEST_CASE("population rescales the rate profile") {
    const PiecewiseConstantRate p{{{0.0, 1.0}, {50.0, 3.0}}, 100.0};
    const auto t = sample_trips(SampledDemand{p, Constant{1.0}, 8}, 0);
    REQUIRE(t.size() == 8);
    CHECK(std::count_if(t.begin(), t.end(), [](const Trip& x) { return x.depart_time_s < 50.0; }) == 2);
    const auto profile = inflow_profile(SampledDemand{p, Constant{1.0}, 8});
    CHECK(profile.total() == doctest::Approx(8.0));
    CHECK(profile.rate(10.0) == doctest::Approx(0.04));
    CHECK(profile.arrivals(40.0, 60.0) == doctest::Approx(0.4 + 1.2));
}

TEST_CASE("sampling is a pure function of spec and seed") {
    const SampledDemand d{PoissonProcess{{{0.0, 1.0}}, 500.0}, LogNormal{0.0, 0.5}, 500};
    CHECK(sample_trips(d, 42) == sample_trips(d, 42));
    CHECK_FALSE(sample_trips(d, 42) == sample_trips(d, 43));
}

TEST_CASE("negexp sample mean converges") {
    const SampledDemand d{PiecewiseConstantRate{{{0.0, 1.0}}, 1.0e6}, NegExp{2.0}, 1000000};
    const auto t = sample_trips(d, 2024);
    const double mean = t.total_distance_km() / static_cast<double>(t.size());
    CHECK(mean >= 1.99);
    CHECK(mean <= 2.01);
}

TEST_CASE("poisson counts scatter around the population") {
    const SampledDemand d{PoissonProcess{{{0.0, 2.0}, {100.0, 0.0}}, 200.0}, Constant{1.0}, 1000};
    double sum = 0.0;
    const int runs = 40;
    for (int s = 0; s < runs; ++s) {
        const auto t = sample_trips(d, static_cast<std::uint64_t>(s));
        for (const auto& trip : t) CHECK_MESSAGE(trip.depart_time_s < 100.0, "departure in a zero-rate piece");
        sum += static_cast<double>(t.size());
    }
    // Poisson(1000): the mean of 40 draws has sd 5.
    CHECK(std::abs(sum / runs - 1000.0) < 25.0);
}

TEST_CASE("time-dependent distances use the piece at the departure time") {
    const auto dist = DistanceDistribution::piecewise({{0.0, DiscreteTable{{{1.0, 1.0}, {2.0, 1.0}}}},
                                                       {100.0, DiscreteTable{{{5.0, 1.0}, {6.0, 3.0}}}}});
    const SampledDemand d{PoissonProcess{{{0.0, 1.0}}, 200.0}, dist, 200};
    const auto t = sample_trips(d, 5);
    REQUIRE(t.size() > 50);
    for (const auto& trip : t) {
        if (trip.depart_time_s < 100.0) {
            CHECK((trip.distance_km == 1.0 || trip.distance_km == 2.0));
        } else {
            CHECK((trip.distance_km == 5.0 || trip.distance_km == 6.0));
        }
    }
    CHECK_THROWS_AS(DistanceDistribution::piecewise({{0.0, Constant{1.0}}, {0.0, Constant{2.0}}}), ValidationError);
}

TEST_CASE("distance shapes: means and survival") {
    CHECK(shape_mean_km(NegExp{3.0}) == 3.0);
    CHECK(shape_mean_km(Constant{2.0}) == 2.0);
    CHECK(shape_mean_km(LogNormal{0.5, 0.4}) == doctest::Approx(std::exp(0.5 + 0.08)));
    CHECK(shape_mean_km(DiscreteTable{{{1.0, 1.0}, {4.0, 3.0}}}) == doctest::Approx(3.25));

    CHECK(shape_survival(NegExp{2.0}, 0.0) == 1.0);
    CHECK(shape_survival(NegExp{2.0}, 2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(shape_survival(Constant{1.0}, 0.999) == 1.0);
    CHECK(shape_survival(Constant{1.0}, 1.0) == 0.0);
    CHECK(shape_survival(LogNormal{0.0, 1.0}, 1.0) == doctest::Approx(0.5));
    CHECK(shape_survival(DiscreteTable{{{1.0, 1.0}, {4.0, 3.0}}}, 1.0) == doctest::Approx(0.75));
    CHECK(shape_survival(DiscreteTable{{{1.0, 1.0}, {4.0, 3.0}}}, 4.0) == 0.0);

    const auto scaled = std::get<LogNormal>(scale_shape(LogNormal{0.0, 0.3}, 2.0));
    CHECK(shape_mean_km(scaled) == doctest::Approx(2.0 * shape_mean_km(LogNormal{0.0, 0.3})));
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(sample_trips(SampledDemand{PiecewiseConstantRate{{{0.0, 1.0}}, 10.0}, NegExp{-1.0}, 10}, 0),
                    ValidationError);
    CHECK_THROWS_AS(sample_trips(SampledDemand{PiecewiseConstantRate{{{0.0, -1.0}}, 10.0}, NegExp{1.0}, 10}, 0),
                    ValidationError);
    CHECK_THROWS_AS(sample_trips(SampledDemand{PiecewiseConstantRate{{{5.0, 1.0}, {5.0, 1.0}}, 10.0}, NegExp{1.0}, 1}, 0),
                    ValidationError);
    CHECK_THROWS_AS(sample_trips(SampledDemand{ExplicitTimes{{3.0, 1.0}}, NegExp{1.0}, 2}, 0), ValidationError);
    CHECK_THROWS_AS(sample_trips(SampledDemand{PiecewiseConstantRate{{{0.0, 1.0}}, 10.0}, LogNormal{0.0, 0.0}, 1}, 0),
                    ValidationError);
}

TEST_CASE("average inflow and suggested step") {
    CHECK(average_inflow(3600, 10.0, 3600.0) == doctest::Approx(0.1));
    CHECK(average_inflow(0, 10.0, 3600.0) == 0.0);
    CHECK(average_inflow(1, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(average_inflow(1, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(average_inflow(1, 1.0, -1.0), ValidationError);

    CHECK(suggested_timestep(0.1, 10.0) == doctest::Approx(1.0));
    CHECK(suggested_timestep(1.0, 1.0) == 1.0);
    CHECK(suggested_timestep(average_inflow(3600, 10.0, 3600.0), 10.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(suggested_timestep(0.0, 1.0), ValidationError);

    CHECK(auto_timestep(100, 1.0, 3600.0) == doctest::Approx(36.0));
    CHECK(auto_timestep(1000000, 1.0, 3600.0) == 1.0);   // floor
    CHECK(auto_timestep(0, 1.0, 3600.0) == 3600.0);
}
