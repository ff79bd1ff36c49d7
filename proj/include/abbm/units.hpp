#pragma once

// All unit conversions live here. Distances are km, times are s, speeds are
// km/h at the fundamental-diagram boundary.

namespace abbm::units {

inline constexpr double seconds_per_hour = 3600.0;

// Distance covered at a constant speed over a time span.
constexpr double km_travelled(double speed_km_h, double span_s) {
    return speed_km_h * span_s / seconds_per_hour;
}

// Time needed to cover a distance at a constant positive speed.
constexpr double seconds_to_cover(double distance_km, double speed_km_h) {
    return distance_km * seconds_per_hour / speed_km_h;
}

constexpr double per_hour(double per_second) { return per_second * seconds_per_hour; }
constexpr double per_second(double per_hour) { return per_hour / seconds_per_hour; }

} // namespace abbm::units
