#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abbm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "abbm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = abbm::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string replace_copy(std::string text, const std::string& from, const std::string& to) {
    return text.replace(text.find(from), from.size(), to);
}

std::string two_trip_config(const std::string& extra = "") {
    return "[scenario]\nL_N_km = 1\nt_f_s = 200\ndt_s = 25\n"
           "[nfd]\ntype = exponential\nu_f_km_h = 50\nrho_j_veh_km = 10\n"
           "[demand]\ntype = explicit\nfile = trips.csv\n" + extra;
}

const char* sampled_config = R"([scenario]
L_N_km = 2
t_f_s = 1800
dt_s = auto
[nfd]
type = trapezoidal
u_f_km_h = 50
capacity_veh_h = 1050
w_km_h = 15
rho_j_veh_km = 140
[demand]
type = sampled
departure = poisson
rates = 0:1, 900:0.2
horizon_s = 1800
population = 400
distance = lognormal(mu_log=0.3, sigma_log=0.5)
seed = 5
)";

} // namespace

TEST_CASE("run writes series, trips and summary for the hand case") {
    Sandbox box("abbm_cli_run");
    box.write("trips.csv", "id,depart_time_s,distance_km\n1,0,0.5\n2,0,1\n");
    const auto cfg = box.write("run.cfg", two_trip_config());
    const auto r = run({"run", "--config", cfg.string(), "--out", (box.dir / "out").string()});
    CHECK(r.code == 0);
    const auto trips = slurp(box.dir / "out" / "trips.csv");
    CHECK(trips.find("id,depart_time_s,distance_km,theta_km,completion_time_s\n") == 0);
    CHECK(trips.find("1,0,0.5,0.5,56.25\n") != std::string::npos);
    CHECK(trips.find(",104.62963\n") != std::string::npos);
    const auto series = slurp(box.dir / "out" / "series.csv");
    CHECK(series.find("t_s,E,G,delta,rho_veh_km,v_km_h,z_km,m_km\n0,2,0,2,2,32,0,1.5\n") == 0);
    const auto summary = slurp(box.dir / "out" / "summary.txt");
    CHECK(summary.find("I = 2\n") != std::string::npos);
    CHECK(summary.find("completed = 2\n") != std::string::npos);
    CHECK(summary.find("max_rho_veh_km = 2\n") != std::string::npos);
    CHECK(fs::exists(box.dir / "out" / "travel_times.csv"));
}

TEST_CASE("empty demand runs at free flow") {
    Sandbox box("abbm_cli_empty");
    box.write("trips.csv", "id,depart_time_s,distance_km\n");
    const auto cfg = box.write("run.cfg", two_trip_config());
    const auto r = run({"run", "--config", cfg.string(), "--out", (box.dir / "out").string()});
    CHECK(r.code == 0);
    const auto summary = slurp(box.dir / "out" / "summary.txt");
    CHECK(summary.find("I = 0\n") != std::string::npos);
    CHECK(summary.find("min_v_km_h = 50\n") != std::string::npos);
}

TEST_CASE("exit codes") {
    Sandbox box("abbm_cli_codes");
    box.write("trips.csv", "id,depart_time_s,distance_km\n1,0,0.5\n");
    const auto bad_dt = box.write("bad.cfg", two_trip_config());
    {
        std::ofstream(bad_dt) << "[scenario]\nL_N_km = 1\nt_f_s = 200\ndt_s = -1\n"
                                 "[nfd]\ntype = exponential\nu_f_km_h = 50\nrho_j_veh_km = 10\n"
                                 "[demand]\ntype = explicit\nfile = trips.csv\n";
    }
    auto r = run({"run", "--config", bad_dt.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("scenario.dt_s") != std::string::npos);

    r = run({"run", "--config", (box.dir / "nope.cfg").string()});
    CHECK(r.code == 3);

    const auto good = box.write("good.cfg", two_trip_config());
    CHECK(run({"run", "--config", good.string(), "--engine", "warp"}).code == 2);
    CHECK(run({"run"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    box.write("blocker", "not a directory");
    CHECK(run({"run", "--config", good.string(), "--out", (box.dir / "blocker" / "x").string()}).code == 3);

    const auto missing_trips = box.write("missing.cfg", replace_copy(two_trip_config(), "trips.csv", "gone.csv"));
    CHECK(run({"run", "--config", missing_trips.string()}).code == 3);
}

TEST_CASE("identical invocations write identical files") {
    Sandbox box("abbm_cli_determinism");
    const auto cfg = box.write("s.cfg", sampled_config);
    for (const char* out : {"a", "b"}) {
        REQUIRE(run({"run", "--config", cfg.string(), "--out", (box.dir / out).string()}).code == 0);
        REQUIRE(run({"montecarlo", "--config", cfg.string(), "--runs", "6", "--out", (box.dir / out).string()}).code == 0);
        REQUIRE(run({"compare", "--config", cfg.string(), "--oracle", "gbm", "--out", (box.dir / out).string()}).code == 0);
    }
    for (const char* f : {"series.csv", "trips.csv", "travel_times.csv", "summary.txt", "batch_series.csv",
                          "batch_summary.txt", "compare.csv", "oracle.csv", "compare_summary.txt"}) {
        CAPTURE(f);
        const auto a = slurp(box.dir / "a" / f);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(box.dir / "b" / f));
    }
    CHECK(run({"run", "--config", cfg.string(), "--seed", "6", "--out", (box.dir / "c").string()}).code == 0);
    CHECK(slurp(box.dir / "c" / "trips.csv") != slurp(box.dir / "a" / "trips.csv"));
}

TEST_CASE("scale writes a config that runs") {
    Sandbox box("abbm_cli_scale");
    std::string trips = "id,depart_time_s,distance_km\n";
    for (int i = 0; i < 20; ++i) trips += std::to_string(i + 1) + ",0,1\n";
    for (int i = 0; i < 30; ++i) trips += std::to_string(i + 21) + ",100,2\n";
    box.write("trips.csv", trips);
    const auto cfg = box.write("run.cfg", replace_copy(two_trip_config(), "L_N_km = 1", "L_N_km = 10"));

    auto r = run({"scale", "--config", cfg.string(), "--ratio", "1/10", "--out", (box.dir / "small").string()});
    CHECK(r.code == 0);
    const auto scaled = slurp(box.dir / "small" / "scaled.cfg");
    CHECK(scaled.find("L_N_km = 1\n") != std::string::npos);
    CHECK(run({"run", "--config", (box.dir / "small" / "scaled.cfg").string(), "--out",
               (box.dir / "small" / "run").string()})
              .code == 0);
    CHECK(slurp(box.dir / "small" / "run" / "summary.txt").find("I = 5\n") != std::string::npos);

    r = run({"scale", "--config", cfg.string(), "--ratio", "1/20", "--out", (box.dir / "bad").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("T=100 s, X=2 km") != std::string::npos);

    r = run({"scale", "--config", cfg.string(), "--ratio", "0.5", "--mode", "distance", "--out",
             (box.dir / "dist").string()});
    CHECK(r.code == 0);
    CHECK(slurp(box.dir / "dist" / "trips.csv").find("1,0,0.5\n") != std::string::npos);
    CHECK(run({"scale", "--config", cfg.string(), "--ratio", "1/2", "--mode", "sideways"}).code == 2);
}

TEST_CASE("compare reports the gap against the oracle") {
    Sandbox box("abbm_cli_compare");
    const auto cfg = box.write("s.cfg", std::string(sampled_config) + "[compare]\noracle = mm\nalpha = 0.2\nd_star_km = 1.4\n");
    const auto r = run({"compare", "--config", cfg.string(), "--out", (box.dir / "o").string()});
    CHECK(r.code == 0);
    const auto summary = slurp(box.dir / "o" / "compare_summary.txt");
    CHECK(summary.find("oracle = mm\n") != std::string::npos);
    CHECK(summary.find("relative_gap = ") != std::string::npos);
    CHECK(slurp(box.dir / "o" / "compare.csv").find("t_s,rho_abm,rho_oracle,v_abm,v_oracle\n") == 0);
}

TEST_CASE("bench writes its table") {
    Sandbox box("abbm_cli_bench");
    const auto r = run({"bench", "--sizes", "50,500,5000", "--out", (box.dir / "b").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("pq log-log slope") != std::string::npos);
    const auto table = slurp(box.dir / "b" / "bench.csv");
    CHECK(table.find("engine,I,L_N_km,dt_s,t_setup_s,t_sim_s,t_post_s\n") == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 7);
    CHECK(run({"bench", "--sizes", "50,500", "--reps", "2", "--out", (box.dir / "c").string()}).code == 2);
    CHECK(run({"bench", "--dt-rule", "sometimes"}).code == 2);
}
