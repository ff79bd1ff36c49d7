#pragma once

// Small hand-rolled generators for property tests. Everything is driven by one
// mt19937_64 so a failing case is reproducible from its seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/nfd.hpp"
#include "abbm/scenario.hpp"

namespace abbm::testgen {

struct Case {
    Scenario scenario;
    TripTable trips;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Nfd random_nfd(std::mt19937_64& rng) {
    const double u_f = uniform(rng, 20.0, 90.0);
    const double rho_j = uniform(rng, 20.0, 200.0);
    switch (pick(rng, 0, 2)) {
    case 0: return ExponentialNfd{u_f, rho_j};
    case 1: {
        const double w = uniform(rng, 5.0, 30.0);
        const double cap = uniform(rng, 0.1, 1.0) * u_f * rho_j * w / (u_f + w);
        return TrapezoidalNfd{u_f, cap, w, rho_j};
    }
    default: {
        const int n = pick(rng, 2, 6);
        std::vector<double> rho{0.0};
        for (int i = 1; i < n; ++i) rho.push_back(uniform(rng, 0.0, rho_j));
        std::sort(rho.begin() + 1, rho.end());
        rho.push_back(rho_j);
        std::vector<std::pair<double, double>> s;
        double v = u_f;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (i > 0 && !(rho[i] > s.back().first)) continue;
            s.emplace_back(rho[i], i + 1 == rho.size() ? 0.0 : v);
            v = uniform(rng, 0.0, v);
        }
        return TabulatedNfd{s};
    }
    }
}

inline DistanceShape random_shape(std::mt19937_64& rng) {
    switch (pick(rng, 0, 3)) {
    case 0: return NegExp{uniform(rng, 0.2, 5.0)};
    case 1: return Constant{uniform(rng, 0.2, 5.0)};
    case 2: return LogNormal{uniform(rng, -1.0, 1.0), uniform(rng, 0.2, 1.0)};
    default: {
        DiscreteTable t;
        const int n = pick(rng, 1, 4);
        for (int i = 0; i < n; ++i) t.entries.emplace_back(uniform(rng, 0.1, 4.0), uniform(rng, 0.5, 2.0));
        return t;
    }
    }
}

// Scenario with at most max_steps steps and a random trip table of up to
// max_trips trips. Some departures sit exactly on step boundaries and some
// (T, X) pairs repeat, to exercise ties.
inline Case random_case(std::uint64_t seed, int max_trips = 200, int max_steps = 500) {
    std::mt19937_64 rng(seed);
    Case c;
    const double dt = uniform(rng, 1.0, 30.0);
    const int steps = pick(rng, 5, max_steps);
    c.scenario = Scenario{uniform(rng, 0.5, 10.0), dt * steps, dt, random_nfd(rng)};
    if (c.scenario.step_count() > max_steps) c.scenario.horizon_s = dt * (max_steps - 1);

    const DistanceDistribution dist(random_shape(rng));
    const int n = pick(rng, 0, max_trips);
    std::vector<Trip> trips;
    for (int i = 0; i < n; ++i) {
        if (!trips.empty() && pick(rng, 0, 9) == 0) {
            trips.push_back(trips[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(trips.size()) - 1))]);
            continue;
        }
        double t = uniform(rng, 0.0, c.scenario.horizon_s);
        if (pick(rng, 0, 4) == 0) t = std::floor(t / dt) * dt;
        trips.push_back({0, t, dist.sample(t, rng)});
    }
    c.trips = sort_by_departure(std::move(trips));
    return c;
}

} // namespace abbm::testgen
