#include "abbm/nfd.hpp"

#include <algorithm>
#include <cmath>

#include "abbm/errors.hpp"

namespace abbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr int max_slope_grid_points = 10000;

bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

// Branch layout of a trapezoidal diagram. When the capacity branch is empty
// (C too large for the given w) the diagram degenerates to a triangle.
struct TrapezoidBranches {
    double free_end;       // end of the free-flow branch
    double capacity_end;   // end of the C/rho branch; equals free_end if absent
};

TrapezoidBranches branches(const TrapezoidalNfd& t) {
    const double a = t.capacity_veh_h / t.u_f_km_h;
    const double b = t.rho_j_veh_km - t.capacity_veh_h / t.w_km_h;
    if (a < b) return {a, b};
    const double c = t.rho_j_veh_km * t.w_km_h / (t.u_f_km_h + t.w_km_h);
    return {c, c};
}

double trapezoid_branch_slope(const TrapezoidalNfd& t, double rho, bool right) {
    const auto br = branches(t);
    const auto in_free = right ? rho < br.free_end : rho <= br.free_end;
    const auto in_capacity = right ? rho < br.capacity_end : rho <= br.capacity_end;
    if (in_free) return 0.0;
    if (in_capacity) return -t.capacity_veh_h / (rho * rho);
    return -t.w_km_h * t.rho_j_veh_km / (rho * rho);
}

// Index of the segment [s_i, s_i+1] containing rho; ties go left unless right.
std::size_t segment(const TabulatedNfd& t, double rho, bool right) {
    const auto& s = t.samples;
    std::size_t i = 0;
    if (right) {
        auto it = std::upper_bound(s.begin(), s.end(), rho, [](double r, const auto& p) { return r < p.first; });
        i = static_cast<std::size_t>(std::distance(s.begin(), it));
        i = i == 0 ? 0 : i - 1;
    } else {
        auto it = std::lower_bound(s.begin(), s.end(), rho, [](const auto& p, double r) { return p.first < r; });
        i = static_cast<std::size_t>(std::distance(s.begin(), it));
        i = i == 0 ? 0 : i - 1;
    }
    return std::min(i, s.size() - 2);
}

double secant(const TabulatedNfd& t, std::size_t i) {
    const auto& [r0, v0] = t.samples[i];
    const auto& [r1, v1] = t.samples[i + 1];
    return (v1 - v0) / (r1 - r0);
}

void validate(const Nfd::Form& form) {
    std::visit(overloaded{
                   [](const ExponentialNfd& e) {
                       if (!finite_pos(e.u_f_km_h)) throw ValidationError("u_f_km_h", "must be > 0");
                       if (!finite_pos(e.rho_j_veh_km)) throw ValidationError("rho_j_veh_km", "must be > 0");
                   },
                   [](const TrapezoidalNfd& t) {
                       if (!finite_pos(t.u_f_km_h)) throw ValidationError("u_f_km_h", "must be > 0");
                       if (!finite_pos(t.rho_j_veh_km)) throw ValidationError("rho_j_veh_km", "must be > 0");
                       if (!finite_pos(t.w_km_h)) throw ValidationError("w_km_h", "must be > 0");
                       if (!finite_pos(t.capacity_veh_h) || t.capacity_veh_h > t.u_f_km_h * t.rho_j_veh_km) {
                           throw ValidationError("capacity_veh_h", "must lie in (0, u_f * rho_j]");
                       }
                   },
                   [](const TabulatedNfd& t) {
                       const auto& s = t.samples;
                       if (s.size() < 2) throw ValidationError("nfd_samples", "need at least two samples");
                       if (s.front().first != 0.0) throw ValidationError("nfd_samples", "first sample must be at rho = 0");
                       if (!finite_pos(s.front().second)) throw ValidationError("nfd_samples", "free-flow speed must be > 0");
                       if (s.back().second != 0.0) throw ValidationError("nfd_samples", "speed must be 0 at jam density");
                       for (std::size_t i = 1; i < s.size(); ++i) {
                           if (!(s[i].first > s[i - 1].first) || !std::isfinite(s[i].first)) {
                               throw ValidationError("nfd_samples", "densities must be strictly increasing");
                           }
                           if (s[i].second > s[i - 1].second || s[i].second < 0.0) {
                               throw ValidationError("nfd_samples", "speeds must be non-increasing and >= 0");
                           }
                       }
                   },
               },
               form);
}

} // namespace

Nfd::Nfd(Form form) : form_(std::move(form)) { validate(form_); }

double Nfd::free_flow_speed() const {
    return std::visit(overloaded{
                          [](const ExponentialNfd& e) { return e.u_f_km_h; },
                          [](const TrapezoidalNfd& t) { return t.u_f_km_h; },
                          [](const TabulatedNfd& t) { return t.samples.front().second; },
                      },
                      form_);
}

double Nfd::jam_density() const {
    return std::visit(overloaded{
                          [](const ExponentialNfd& e) { return e.rho_j_veh_km; },
                          [](const TrapezoidalNfd& t) { return t.rho_j_veh_km; },
                          [](const TabulatedNfd& t) { return t.samples.back().first; },
                      },
                      form_);
}

double Nfd::speed(double rho) const {
    if (!(rho >= 0.0)) throw ValidationError("rho", "density must be >= 0");
    if (rho >= jam_density()) return 0.0;
    return std::visit(overloaded{
                          [rho](const ExponentialNfd& e) {
                              const double f = 1.0 - rho / e.rho_j_veh_km;
                              return e.u_f_km_h * f * f;
                          },
                          [rho](const TrapezoidalNfd& t) {
                              if (rho == 0.0) return t.u_f_km_h;
                              const double v = std::min({t.u_f_km_h, t.capacity_veh_h / rho,
                                                         t.w_km_h * (t.rho_j_veh_km / rho - 1.0)});
                              return std::max(v, 0.0);
                          },
                          [rho](const TabulatedNfd& t) {
                              const auto i = segment(t, rho, true);
                              const auto& [r0, v0] = t.samples[i];
                              return v0 + secant(t, i) * (rho - r0);
                          },
                      },
                      form_);
}

double Nfd::slope(double rho) const {
    if (!(rho >= 0.0) || rho > jam_density()) throw ValidationError("rho", "density must lie in [0, rho_j]");
    return std::visit(overloaded{
                          [rho](const ExponentialNfd& e) {
                              return -2.0 * e.u_f_km_h / e.rho_j_veh_km * (1.0 - rho / e.rho_j_veh_km);
                          },
                          [rho](const TrapezoidalNfd& t) { return trapezoid_branch_slope(t, rho, false); },
                          [rho](const TabulatedNfd& t) { return secant(t, segment(t, rho, false)); },
                      },
                      form_);
}

double Nfd::slope_right(double rho) const {
    return std::visit(overloaded{
                          [this, rho](const ExponentialNfd&) { return slope(rho); },
                          [rho](const TrapezoidalNfd& t) {
                              return rho >= t.rho_j_veh_km ? trapezoid_branch_slope(t, rho, false)
                                                           : trapezoid_branch_slope(t, rho, true);
                          },
                          [rho](const TabulatedNfd& t) { return secant(t, segment(t, rho, true)); },
                      },
                      form_);
}

std::vector<double> Nfd::kinks() const {
    return std::visit(overloaded{
                          [](const ExponentialNfd&) { return std::vector<double>{}; },
                          [](const TrapezoidalNfd& t) {
                              const auto br = branches(t);
                              if (br.free_end == br.capacity_end) return std::vector<double>{br.free_end};
                              return std::vector<double>{br.free_end, br.capacity_end};
                          },
                          [](const TabulatedNfd& t) {
                              std::vector<double> out;
                              for (std::size_t i = 1; i + 1 < t.samples.size(); ++i) out.push_back(t.samples[i].first);
                              return out;
                          },
                      },
                      form_);
}

double Nfd::max_abs_slope() const {
    const double rho_j = jam_density();
    double best = 0.0;
    const auto consider = [&](double rho) {
        best = std::max({best, std::abs(slope(rho)), std::abs(slope_right(rho))});
    };
    for (int i = 0; i <= max_slope_grid_points; ++i) {
        consider(rho_j * static_cast<double>(i) / max_slope_grid_points);
    }
    for (double k : kinks()) consider(k);
    return best;
}

double max_speed_variation(const Nfd& nfd, double network_km, double delta_agents) {
    if (!finite_pos(network_km)) throw ValidationError("L_N_km", "must be > 0");
    return nfd.max_abs_slope() * delta_agents / network_km;
}

double min_length_for_smoothness(const Nfd& nfd, double delta_v_km_h) {
    if (!finite_pos(delta_v_km_h)) throw ValidationError("delta_v", "must be > 0");
    return nfd.max_abs_slope() / delta_v_km_h;
}

} // namespace abbm
