#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace abbm::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_io = 3;

struct Options {
    std::filesystem::path config;
    std::optional<std::string> engine;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> runs;
    std::string ratio;
    std::string mode = "flow";
    std::optional<std::string> oracle;
    // bench only
    std::string bench_engine = "both";
    std::vector<std::int64_t> sizes = {1000, 10000, 100000};
    int repetitions = 5;
    std::string dt_rule = "inflow";
};

// Each command reports failures on `err` and maps them to exit codes:
// validation 2, I/O 3.
int cmd_run(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_scale(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const Options& opts, std::ostream& out, std::ostream& err);

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace abbm::cli
