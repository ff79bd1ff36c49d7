#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace abbm {

// V(rho) = u_f (1 - rho/rho_j)^2
struct ExponentialNfd {
    double u_f_km_h;
    double rho_j_veh_km;
};

// V(rho) = min{u_f, C/rho, w (rho_j/rho - 1)}, with V(0) = u_f.
struct TrapezoidalNfd {
    double u_f_km_h;
    double capacity_veh_h;
    double w_km_h;
    double rho_j_veh_km;
};

// Piecewise-linear through (rho, v) samples. The first sample sits at rho = 0
// and the last at jam density with v = 0.
struct TabulatedNfd {
    std::vector<std::pair<double, double>> samples;
};

// Network fundamental diagram. Speeds in km/h, densities in veh/km.
class Nfd {
public:
    using Form = std::variant<ExponentialNfd, TrapezoidalNfd, TabulatedNfd>;

    Nfd(Form form); // NOLINT: implicit so the forms read naturally at call sites
    Nfd(ExponentialNfd f) : Nfd(Form(f)) {} // NOLINT
    Nfd(TrapezoidalNfd f) : Nfd(Form(f)) {} // NOLINT
    Nfd(TabulatedNfd f) : Nfd(Form(std::move(f))) {} // NOLINT

    const Form& form() const { return form_; }
    double free_flow_speed() const;
    double jam_density() const;

    double speed(double rho) const;
    // dV/drho; left-branch value at kinks.
    double slope(double rho) const;
    // max over [0, rho_j] of |dV/drho|, including one-sided limits at kinks.
    double max_abs_slope() const;

    // Density breakpoints where the derivative is discontinuous.
    std::vector<double> kinks() const;

private:
    double slope_right(double rho) const;

    Form form_;
};

// Largest speed change caused by delta_agents trips entering or leaving.
double max_speed_variation(const Nfd& nfd, double network_km, double delta_agents = 1.0);

// Smallest (scaled) network length keeping single-agent speed jumps <= delta_v.
double min_length_for_smoothness(const Nfd& nfd, double delta_v_km_h);

} // namespace abbm
