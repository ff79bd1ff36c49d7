#include <doctest.h>

#include <cmath>

#include "abbm/continuum.hpp"
#include "abbm/errors.hpp"

using namespace abbm;

namespace {

const Nfd expo = ExponentialNfd{50.0, 140.0};

// Free-flow root of rho V(rho) = q by plain bisection on [0, rho_j / 3], where
// the production of the exponential diagram is increasing.
double steady_density(double q_veh_h_km) {
    double lo = 0.0;
    double hi = 140.0 / 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid * 50.0 * (1.0 - mid / 140.0) * (1.0 - mid / 140.0);
        (f < q_veh_h_km ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void check_bounds(const ContinuumOutput& out, double u_f) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        CHECK(out.delta[k] >= 0.0);
        CHECK(out.v_km_h[k] >= 0.0);
        CHECK(out.v_km_h[k] <= u_f);
        if (k > 0) CHECK(out.z_km[k] >= out.z_km[k - 1]);
    }
}

} // namespace

TEST_CASE("empty inflow leaves the network empty") {
    const Scenario sc{10.0, 600.0, 10.0, expo};
    const ContinuumDemand d{InflowProfile::empty(), NegExp{3.0}};
    for (const auto& out : {solve_vbm(sc, d), solve_gbm(sc, d), solve_mm(sc, d, 0.5, 3.0)}) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            CHECK(out.delta[k] == 0.0);
            CHECK(out.v_km_h[k] == 50.0);
        }
    }
}

TEST_CASE("VBM settles at the independently found steady density") {
    const double network_km = 10.0;
    const double mean_km = 3.0;
    const double q = 600.0;   // veh/(h km) of demanded production
    const double rate = q * network_km / mean_km / 3600.0;
    const Scenario sc{network_km, 4.0 * 3600.0, 5.0, expo};
    const auto out = solve_vbm(sc, {InflowProfile::constant(rate, sc.horizon_s), NegExp{mean_km}});
    check_bounds(out, 50.0);
    const double rho_star = steady_density(q);
    const double rho_end = out.delta.back() / network_km;
    CHECK(std::abs(rho_end - rho_star) <= 1e-3 * rho_star);
    const double residual = rate * 3600.0 * mean_km / network_km - rho_end * expo.speed(rho_end);
    CHECK(std::abs(residual) < 1e-3 * q);
}

TEST_CASE("VBM drains monotonically once inflow stops") {
    const Scenario sc{5.0, 3.0 * 3600.0, 5.0, expo};
    const auto out = solve_vbm(sc, {InflowProfile({{0.0, 1.0}, {1200.0, 0.0}}, sc.horizon_s), NegExp{2.0}});
    check_bounds(out, 50.0);
    const auto after = static_cast<std::size_t>(1200.0 / 5.0) + 1;
    for (std::size_t k = after + 1; k < out.size(); ++k) CHECK(out.delta[k] <= out.delta[k - 1]);
    CHECK(out.delta.back() < 1e-3 * out.delta[after]);
}

TEST_CASE("VBM rejects time-dependent distances and bad initial states") {
    const Scenario sc{5.0, 600.0, 5.0, expo};
    const auto dist = DistanceDistribution::piecewise({{0.0, NegExp{1.0}}, {100.0, NegExp{2.0}}});
    CHECK_THROWS_AS(solve_vbm(sc, {InflowProfile::constant(1.0, 600.0), dist}), ValidationError);
    CHECK_THROWS_AS(solve_mm(sc, {InflowProfile::constant(1.0, 600.0), dist}, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(solve_vbm(sc, {InflowProfile::empty(), NegExp{1.0}}, {-1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(solve_mm(sc, {InflowProfile::empty(), NegExp{1.0}}, 0.1, 0.0), ValidationError);
    CHECK_THROWS_AS(solve_mm(sc, {InflowProfile::empty(), NegExp{1.0}}, -0.1, 1.0), ValidationError);
    // GBM handles time dependence through the survival function
    CHECK_NOTHROW(solve_gbm(sc, {InflowProfile::constant(1.0, 600.0), dist}));
}

TEST_CASE("GBM with constant distances holds a pulse until z covers the distance") {
    const double q = 50.0;
    const Scenario sc{10.0, 1200.0, 10.0, expo};
    const auto out = solve_gbm(sc, {InflowProfile({{0.0, q / 10.0}, {10.0, 0.0}}, 1200.0), Constant{2.0}});
    CHECK(out.delta[0] == 0.0);
    const double entry = 0.5 * out.z_km[1];
    bool left = false;
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out.z_km[k] - entry < 2.0) {
            CHECK(out.delta[k] == doctest::Approx(q));
            CHECK_FALSE(left);
        } else {
            CHECK(out.delta[k] == 0.0);
            left = true;
        }
    }
    CHECK(left);
}

TEST_CASE("GBM with negexp distances tracks VBM") {
    const Scenario sc{10.0, 2.0 * 3600.0, 2.0, expo};
    const ContinuumDemand d{InflowProfile({{0.0, 2.0}, {1800.0, 0.5}, {3600.0, 0.0}}, sc.horizon_s), NegExp{3.0}};
    const auto vbm = solve_vbm(sc, d);
    const auto gbm = solve_gbm(sc, d);
    check_bounds(gbm, 50.0);
    double sup = 0.0;
    double peak = 0.0;
    for (std::size_t k = 0; k < vbm.size(); ++k) {
        sup = std::max(sup, std::abs(vbm.delta[k] - gbm.delta[k]));
        peak = std::max(peak, vbm.delta[k]);
    }
    CHECK(sup <= 0.005 * peak);
}

TEST_CASE("M-model with alpha = 0 is VBM") {
    const Scenario sc{4.0, 3600.0, 3.0, expo};
    const ContinuumDemand d{InflowProfile({{0.0, 0.8}, {1800.0, 0.1}}, 3600.0), LogNormal{0.5, 0.6}};
    const auto vbm = solve_vbm(sc, d, {10.0, 0.0});
    const auto mm = solve_mm(sc, d, 0.0, 7.0, {10.0, 25.0});
    CHECK(vbm.delta == mm.delta);
    CHECK(vbm.v_km_h == mm.v_km_h);
    CHECK(vbm.z_km == mm.z_km);
    CHECK(mm.m_km.size() == mm.size());
    CHECK(vbm.m_km.empty());
}

TEST_CASE("M-model steady state has m / delta = D*") {
    const Scenario sc{10.0, 6.0 * 3600.0, 5.0, expo};
    const ContinuumDemand d{InflowProfile::constant(0.5, sc.horizon_s), NegExp{3.0}};
    const double d_star = 2.2;
    const auto out = solve_mm(sc, d, 0.4, d_star);
    check_bounds(out, 50.0);
    const double ratio = out.m_km.back() / out.delta.back();
    CHECK(ratio == doctest::Approx(d_star).epsilon(1e-4));
    const double correction = 1.0 - 0.4 * (ratio / d_star - 1.0);
    CHECK(correction == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("M-model drains an initially loaded network") {
    const Scenario sc{5.0, 4.0 * 3600.0, 5.0, expo};
    const auto out = solve_mm(sc, {InflowProfile::empty(), NegExp{2.0}}, 0.3, 2.0, {100.0, 200.0});
    check_bounds(out, 50.0);
    for (std::size_t k = 1; k < out.size(); ++k) {
        CHECK(out.delta[k] <= out.delta[k - 1]);
        CHECK(out.m_km[k] <= out.m_km[k - 1]);
    }
    CHECK(out.delta.back() < 1e-3);
    CHECK(out.m_km.back() < 1e-3);
}

TEST_CASE("density gap") {
    StepSeries agents;
    agents.rho_veh_km = {0.0, 1.0, 2.0};
    agents.t_s = {0.0, 1.0, 2.0};
    ContinuumOutput c;
    c.t_s = {0.0, 1.0, 2.0};
    c.delta = {0.0, 3.0, 8.0};
    const auto gap = density_gap(agents, c, 4.0);
    CHECK(gap.sup_abs_veh_km == doctest::Approx(0.25));
    CHECK(gap.peak_veh_km == doctest::Approx(2.0));
    CHECK(gap.relative == doctest::Approx(0.125));
    c.t_s.pop_back();
    c.delta.pop_back();
    CHECK_THROWS_AS(density_gap(agents, c, 4.0), ValidationError);
}
