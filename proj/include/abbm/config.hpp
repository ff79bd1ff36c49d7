#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abbm/demand.hpp"
#include "abbm/engine.hpp"
#include "abbm/scenario.hpp"

namespace abbm {

// Line-oriented "[section]" / "key = value" text. '#' starts a comment.
class ConfigDocument {
public:
    static ConfigDocument parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigDocument load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string require(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const { return sections_.contains(section); }

    // Directory that relative file paths in the document resolve against.
    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::filesystem::path base_dir_ = ".";
};

enum class ContinuumOracle { vbm, gbm, mm };
ContinuumOracle parse_oracle(std::string_view name);

struct CompareSettings {
    ContinuumOracle oracle = ContinuumOracle::vbm;
    double alpha = 0.0;
    double d_star_km = 1.0;
    double tolerance = 0.05;   // allowed sup |rho_abm - rho_oracle| relative to peak rho
};

struct RunConfig {
    Scenario scenario;
    bool dt_auto = false;
    DemandSpec demand;
    std::uint64_t seed = 0;
    EngineKind engine = EngineKind::pq;
    std::filesystem::path out_dir = "out";
    std::int64_t runs = 1;
    double bin_width_s = 60.0;
    CompareSettings compare;
};

// Builds and validates a run configuration; every failure is a
// ValidationError naming "section.key".
RunConfig build_run_config(const ConfigDocument& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Parsers for the value syntaxes, exposed for reuse and testing.
DistanceDistribution parse_distance(const std::string& text);
std::vector<RatePiece> parse_rates(const std::string& text);
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

// Canonical text for a configuration. Explicit demand is written to
// `trips_file` (relative to the config) and referenced from the text.
std::string serialize_config(const RunConfig& config, const std::string& trips_file = "trips.csv");
std::string serialize_distance(const DistanceDistribution& dist);

} // namespace abbm
