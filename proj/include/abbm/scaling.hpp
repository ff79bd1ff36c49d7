#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

// Positive rational number, always stored in lowest terms.
class Ratio {
public:
    Ratio(std::int64_t num, std::int64_t den = 1);

    // "1/10", "0.1", "3" or "2.5e-3" parsed exactly (decimals become n/10^k).
    static Ratio parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend bool operator==(const Ratio&, const Ratio&) = default;

private:
    std::int64_t num_;
    std::int64_t den_;
};

enum class ScalingKind { flow, distance };

struct ScalingSpec {
    ScalingKind kind;
    Ratio ratio;
};

ScalingKind parse_scaling_kind(std::string_view name);

struct ScaledSystem {
    Scenario scenario;
    DemandSpec demand;
    std::vector<std::string> warnings;
};

// r < 1 down-scales, r > 1 up-scales. Network length and agent count change by
// the same factor; the NFD and the distance distribution stay as they are.
// Explicit demand is grouped by identical (T, X) pairs and every group count
// must scale to an integer, otherwise IntegralityError names the group.
ScaledSystem scale_flow(const Scenario& scenario, const DemandSpec& demand, Ratio r);

// Network length and every trip distance scale by r; agent count is kept.
ScaledSystem scale_distance(const Scenario& scenario, const DemandSpec& demand, double r);

ScaledSystem apply_scaling(const Scenario& scenario, const DemandSpec& demand, const ScalingSpec& spec);

// 1 / gcd of the grouped counts.
Ratio min_scaling_ratio(std::span<const std::int64_t> grouped_counts);

struct DemandGroup {
    double depart_time_s;
    double distance_km;
    std::int64_t count;
};

// Groups trips by bit-identical (T, X), in order of first appearance.
std::vector<DemandGroup> group_trips(const TripTable& trips);

} // namespace abbm
