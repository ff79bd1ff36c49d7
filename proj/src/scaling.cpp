#include "abbm/scaling.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "abbm/errors.hpp"

namespace abbm {

namespace {

__extension__ using wide_int = __int128;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ValidationError("ratio", "cannot parse '" + std::string(whole) + "'");
    }
    return value;
}

std::int64_t pow10(int k, std::string_view whole) {
    if (k < 0 || k > 18) throw ValidationError("ratio", "too many decimal digits in '" + std::string(whole) + "'");
    std::int64_t p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

std::string describe(const DemandGroup& g) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "group (T=%.9g s, X=%.9g km) with %lld trips", g.depart_time_s, g.distance_km,
                  static_cast<long long>(g.count));
    return buf;
}

// n * r as an integer, or IntegralityError naming the group.
std::int64_t scaled_count(const DemandGroup& g, Ratio r) {
    const auto numerator = static_cast<wide_int>(g.count) * r.num();
    if (numerator % r.den() != 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " scales to %.9g agents at r=", static_cast<double>(numerator) / static_cast<double>(r.den()));
        throw IntegralityError(describe(g) + buf + r.str() + ", which is not an integer");
    }
    return static_cast<std::int64_t>(numerator / r.den());
}

Scenario scaled_scenario(const Scenario& s, double r) {
    Scenario out = s;
    out.network_km = s.network_km * r;
    return out;
}

} // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
    if (num <= 0 || den <= 0) throw ValidationError("ratio", "must be a positive rational");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Ratio Ratio::parse(std::string_view text) {
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        return Ratio(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
    }
    int exponent = 0;
    std::string_view mantissa = text;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        const auto exp_text = text.substr(e + 1);
        exponent = static_cast<int>(parse_int(exp_text.starts_with('+') ? exp_text.substr(1) : exp_text, text));
        mantissa = text.substr(0, e);
    }
    std::string digits;
    int decimals = 0;
    if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
        decimals = static_cast<int>(mantissa.size() - dot - 1);
    } else {
        digits = std::string(mantissa);
    }
    if (digits.empty()) throw ValidationError("ratio", "cannot parse '" + std::string(text) + "'");
    std::int64_t num = parse_int(digits, text);
    std::int64_t den = 1;
    const int shift = exponent - decimals;
    if (shift >= 0) {
        num *= pow10(shift, text);
    } else {
        den = pow10(-shift, text);
    }
    return Ratio(num, den);
}

std::string Ratio::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

ScalingKind parse_scaling_kind(std::string_view name) {
    if (name == "flow") return ScalingKind::flow;
    if (name == "distance") return ScalingKind::distance;
    throw ValidationError("mode", "expected flow or distance, got '" + std::string(name) + "'");
}

std::vector<DemandGroup> group_trips(const TripTable& trips) {
    std::vector<DemandGroup> groups;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index;
    for (const Trip& t : trips) {
        const auto key = std::make_pair(std::bit_cast<std::uint64_t>(t.depart_time_s),
                                        std::bit_cast<std::uint64_t>(t.distance_km));
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) {
            groups.push_back({t.depart_time_s, t.distance_km, 1});
        } else {
            ++groups[it->second].count;
        }
    }
    return groups;
}

Ratio min_scaling_ratio(std::span<const std::int64_t> grouped_counts) {
    if (grouped_counts.empty()) throw ValidationError("counts", "need at least one group");
    std::int64_t g = 0;
    for (auto n : grouped_counts) {
        if (n <= 0) throw ValidationError("counts", "group counts must be positive");
        g = std::gcd(g, n);
    }
    return Ratio(1, g);
}

ScaledSystem scale_flow(const Scenario& scenario, const DemandSpec& demand, Ratio r) {
    ScaledSystem out{scaled_scenario(scenario, r.value()), demand, {}};
    std::visit(overloaded{
                   [&](const ExplicitDemand& e) {
                       std::vector<Trip> trips;
                       for (const auto& g : group_trips(e.trips)) {
                           const auto n = scaled_count(g, r);
                           for (std::int64_t i = 0; i < n; ++i) trips.push_back({0, g.depart_time_s, g.distance_km});
                       }
                       out.demand = ExplicitDemand{sort_by_departure(std::move(trips))};
                   },
                   [&](const SampledDemand& s) {
                       SampledDemand scaled = s;
                       if (const auto* times = std::get_if<ExplicitTimes>(&s.departure)) {
                           // Departure instants act as groups here.
                           std::vector<double> out_times;
                           for (std::size_t i = 0; i < times->times_s.size();) {
                               std::size_t j = i;
                               while (j < times->times_s.size() && times->times_s[j] == times->times_s[i]) ++j;
                               const DemandGroup g{times->times_s[i], 0.0, static_cast<std::int64_t>(j - i)};
                               out_times.insert(out_times.end(), static_cast<std::size_t>(scaled_count(g, r)), g.depart_time_s);
                               i = j;
                           }
                           scaled.departure = ExplicitTimes{std::move(out_times)};
                           scaled.population = static_cast<std::int64_t>(std::get<ExplicitTimes>(scaled.departure).times_s.size());
                       } else {
                           const auto exact = static_cast<wide_int>(s.population) * r.num();
                           scaled.population = static_cast<std::int64_t>((exact + r.den() / 2) / r.den());
                           if (exact % r.den() != 0) {
                               out.warnings.push_back("population " + std::to_string(s.population) + " * " + r.str() +
                                                      " is not an integer; rounded to " +
                                                      std::to_string(scaled.population));
                           }
                       }
                       out.demand = std::move(scaled);
                   },
               },
               demand);
    return out;
}

ScaledSystem scale_distance(const Scenario& scenario, const DemandSpec& demand, double r) {
    if (!std::isfinite(r) || !(r > 0.0)) throw ValidationError("ratio", "must be > 0");
    ScaledSystem out{scaled_scenario(scenario, r), demand, {}};
    std::visit(overloaded{
                   [&](const ExplicitDemand& e) {
                       std::vector<Trip> trips(e.trips.begin(), e.trips.end());
                       for (Trip& t : trips) t.distance_km *= r;
                       out.demand = ExplicitDemand{TripTable::from_sorted(std::move(trips))};
                   },
                   [&](const SampledDemand& s) {
                       SampledDemand scaled = s;
                       scaled.distance = s.distance.scaled(r);
                       out.demand = std::move(scaled);
                   },
               },
               demand);
    return out;
}

ScaledSystem apply_scaling(const Scenario& scenario, const DemandSpec& demand, const ScalingSpec& spec) {
    return spec.kind == ScalingKind::flow ? scale_flow(scenario, demand, spec.ratio)
                                          : scale_distance(scenario, demand, spec.ratio.value());
}

} // namespace abbm
