#include "abbm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <utility>

#include "abbm/analysis.hpp"
#include "abbm/bench.hpp"
#include "abbm/config.hpp"
#include "abbm/continuum.hpp"
#include "abbm/csv.hpp"
#include "abbm/errors.hpp"
#include "abbm/scaling.hpp"

namespace abbm::cli {

namespace {

namespace fs = std::filesystem;

using Summary = std::vector<std::pair<std::string, std::string>>;

std::string integer(std::int64_t v) { return std::to_string(v); }

void write_summary(const fs::path& path, const Summary& summary) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [key, value] : summary) out << key << " = " << value << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

fs::path prepare_out_dir(const Options& opts, const RunConfig& cfg) {
    const fs::path dir = opts.out ? *opts.out : cfg.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

RunConfig load(const Options& opts) {
    if (opts.config.empty()) throw ValidationError("--config", "a config file is required");
    auto cfg = load_run_config(opts.config);
    if (opts.engine) cfg.engine = parse_engine(*opts.engine);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.runs) {
        if (*opts.runs < 1) throw ValidationError("--runs", "must be >= 1");
        cfg.runs = *opts.runs;
    }
    if (opts.oracle) cfg.compare.oracle = parse_oracle(*opts.oracle);
    return cfg;
}

void append_tttd(Summary& s, const TTTDStats& t) {
    s.emplace_back("completed", integer(t.count));
    s.emplace_back("uncompleted", integer(t.uncompleted_count));
    s.emplace_back("mean_travel_time_s", csv::number(t.mean_s));
    s.emplace_back("std_travel_time_s", csv::number(t.std_s));
    s.emplace_back("p5_travel_time_s", csv::number(t.p5));
    s.emplace_back("p25_travel_time_s", csv::number(t.p25));
    s.emplace_back("p50_travel_time_s", csv::number(t.p50));
    s.emplace_back("p75_travel_time_s", csv::number(t.p75));
    s.emplace_back("p95_travel_time_s", csv::number(t.p95));
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const IntegralityError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
}

const SampledDemand& require_rate_demand(const RunConfig& cfg, const char* command) {
    const auto* s = std::get_if<SampledDemand>(&cfg.demand);
    if (!s || std::holds_alternative<ExplicitTimes>(s->departure)) {
        throw ValidationError("demand.departure", std::string(command) + " needs a sampled rate or poisson demand");
    }
    return *s;
}

} // namespace

int cmd_run(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load(opts);
        const auto dir = prepare_out_dir(opts, cfg);
        const auto trips = sample_trips(cfg.demand, cfg.seed);
        const auto sim = run_engine(cfg.engine, cfg.scenario, trips);
        const auto records = travel_times(sim, trips);
        const auto stats = tttd(records, cfg.bin_width_s);

        csv::write_series(dir / "series.csv", sim);
        csv::write_trip_outcomes(dir / "trips.csv", records);
        csv::write_travel_records(dir / "travel_times.csv", records);

        const auto& rho = sim.steps.rho_veh_km;
        Summary s;
        s.emplace_back("engine", std::string(to_string(cfg.engine)));
        s.emplace_back("I", integer(static_cast<std::int64_t>(trips.size())));
        s.emplace_back("dt_s", csv::number(cfg.scenario.dt_s));
        s.emplace_back("steps", integer(cfg.scenario.step_count()));
        append_tttd(s, stats);
        s.emplace_back("max_rho_veh_km", csv::number(rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end())));
        s.emplace_back("min_v_km_h", csv::number(*std::min_element(sim.steps.v_km_h.begin(), sim.steps.v_km_h.end())));
        s.emplace_back("final_z_km", csv::number(sim.steps.z_km.back()));
        write_summary(dir / "summary.txt", s);

        out << "run: " << trips.size() << " trips, " << stats.count << " completed; wrote " << dir.string() << '\n';
        return exit_ok;
    });
}

int cmd_montecarlo(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load(opts);
        const auto dir = prepare_out_dir(opts, cfg);
        const auto stats = run_batch(cfg.scenario, cfg.demand, cfg.runs, cfg.seed, 0, cfg.bin_width_s);

        csv::write_batch_series(dir / "batch_series.csv", stats);
        Summary s;
        s.emplace_back("runs", integer(stats.runs));
        s.emplace_back("base_seed", std::to_string(cfg.seed));
        std::string seeds;
        for (auto seed : stats.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(seed);
        s.emplace_back("seeds", seeds);
        append_tttd(s, stats.pooled);
        s.emplace_back("histogram_bin_s", csv::number(stats.pooled.histogram.bin_width_s));
        std::string hist;
        for (auto c : stats.pooled.histogram.counts) hist += (hist.empty() ? "" : ",") + std::to_string(c);
        s.emplace_back("histogram_counts", hist);
        write_summary(dir / "batch_summary.txt", s);

        out << "montecarlo: " << stats.runs << " runs; wrote " << dir.string() << '\n';
        return exit_ok;
    });
}

int cmd_bench(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Scenario scenario{10.0, 1800.0, 20.0, ExponentialNfd{50.0, 140.0}};
        SampledDemand demand{PiecewiseConstantRate{{{0.0, 1.0}}, 1800.0}, DistanceDistribution(NegExp{3.0}), 1000};
        fs::path dir = opts.out ? *opts.out : fs::path("bench");
        if (!opts.config.empty()) {
            const auto cfg = load(opts);
            scenario = cfg.scenario;
            demand = require_rate_demand(cfg, "bench");
            if (!opts.out) dir = cfg.out_dir;
        }
        SweepOptions sweep_opts;
        sweep_opts.repetitions = opts.repetitions;
        if (opts.dt_rule == "inflow") {
            sweep_opts.dt_rule = TimestepRule::inflow;
        } else if (opts.dt_rule == "fixed") {
            sweep_opts.dt_rule = TimestepRule::fixed;
        } else {
            throw ValidationError("--dt-rule", "expected inflow or fixed");
        }

        std::vector<EngineKind> engines;
        if (opts.bench_engine == "both") {
            engines = {EngineKind::naive, EngineKind::pq};
        } else {
            engines = {parse_engine(opts.bench_engine)};
        }
        auto sizes = opts.sizes;
        std::sort(sizes.begin(), sizes.end());

        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

        std::vector<BenchPoint> all;
        Summary s;
        for (auto engine : engines) {
            const auto points = sweep(engine, sizes, scenario, demand, sweep_opts);
            for (const auto& p : points) {
                out << to_string(engine) << " I=" << p.trips << " t_sim_s=" << csv::number(p.t_sim_s) << '\n';
            }
            all.insert(all.end(), points.begin(), points.end());
            if (points.size() >= 3 && sizes.back() >= 100 * sizes.front()) {
                const double slope = fit_slope(points);
                s.emplace_back(std::string(to_string(engine)) + "_slope", csv::number(slope));
                out << to_string(engine) << " log-log slope " << csv::number(slope) << '\n';
            }
        }
        csv::write_bench(dir / "bench.csv", all);
        write_summary(dir / "bench_summary.txt", s);
        return exit_ok;
    });
}

int cmd_scale(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto cfg = load(opts);
        if (opts.ratio.empty()) throw ValidationError("--ratio", "required");
        const ScalingSpec spec{parse_scaling_kind(opts.mode), Ratio::parse(opts.ratio)};
        const auto scaled = apply_scaling(cfg.scenario, cfg.demand, spec);
        for (const auto& w : scaled.warnings) err << "warning: " << w << '\n';

        cfg.scenario = scaled.scenario;
        cfg.demand = scaled.demand;
        if (cfg.dt_auto) {
            const auto trips = std::visit([](const auto& d) -> std::int64_t {
                if constexpr (std::is_same_v<std::decay_t<decltype(d)>, ExplicitDemand>) {
                    return static_cast<std::int64_t>(d.trips.size());
                } else {
                    return d.population;
                }
            }, cfg.demand);
            cfg.scenario.dt_s = auto_timestep(trips, cfg.scenario.network_km, cfg.scenario.horizon_s);
        }
        const auto dir = prepare_out_dir(opts, cfg);
        if (const auto* e = std::get_if<ExplicitDemand>(&cfg.demand)) csv::write_trips(dir / "trips.csv", e->trips);

        std::ofstream file(dir / "scaled.cfg", std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open " + (dir / "scaled.cfg").string() + " for writing");
        file << serialize_config(cfg, "trips.csv");
        if (!file) throw IoError("failed writing scaled.cfg");

        out << "scale: " << opts.mode << " r=" << spec.ratio.str() << ", L_N_km=" << csv::number(cfg.scenario.network_km)
            << "; wrote " << (dir / "scaled.cfg").string() << '\n';
        return exit_ok;
    });
}

int cmd_compare(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load(opts);
        const auto& sampled = require_rate_demand(cfg, "compare");
        const auto dir = prepare_out_dir(opts, cfg);

        const auto trips = sample_trips(cfg.demand, cfg.seed);
        const auto sim = run_pq(cfg.scenario, trips);
        const ContinuumDemand demand{inflow_profile(sampled), sampled.distance};
        ContinuumOutput oracle;
        const char* name = "vbm";
        switch (cfg.compare.oracle) {
        case ContinuumOracle::vbm: oracle = solve_vbm(cfg.scenario, demand); break;
        case ContinuumOracle::gbm:
            oracle = solve_gbm(cfg.scenario, demand);
            name = "gbm";
            break;
        case ContinuumOracle::mm:
            oracle = solve_mm(cfg.scenario, demand, cfg.compare.alpha, cfg.compare.d_star_km);
            name = "mm";
            break;
        }
        const auto gap = density_gap(sim.steps, oracle, cfg.scenario.network_km);

        csv::write_series(dir / "series.csv", sim);
        csv::write_continuum(dir / "oracle.csv", oracle, cfg.scenario.network_km);
        {
            const fs::path path = dir / "compare.csv";
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw IoError("cannot open " + path.string() + " for writing");
            f << "t_s,rho_abm,rho_oracle,v_abm,v_oracle\n";
            for (std::size_t k = 0; k < oracle.size(); ++k) {
                f << csv::number(oracle.t_s[k]) << ',' << csv::number(sim.steps.rho_veh_km[k]) << ','
                  << csv::number(oracle.delta[k] / cfg.scenario.network_km) << ',' << csv::number(sim.steps.v_km_h[k])
                  << ',' << csv::number(oracle.v_km_h[k]) << '\n';
            }
            if (!f) throw IoError("failed writing " + path.string());
        }
        Summary s;
        s.emplace_back("oracle", name);
        s.emplace_back("I", integer(static_cast<std::int64_t>(trips.size())));
        s.emplace_back("sup_gap_rho_veh_km", csv::number(gap.sup_abs_veh_km));
        s.emplace_back("peak_rho_veh_km", csv::number(gap.peak_veh_km));
        s.emplace_back("relative_gap", csv::number(gap.relative));
        s.emplace_back("tolerance", csv::number(cfg.compare.tolerance));
        s.emplace_back("within_tolerance", gap.relative <= cfg.compare.tolerance ? "true" : "false");
        write_summary(dir / "compare_summary.txt", s);

        out << "compare: " << name << " relative sup gap " << csv::number(gap.relative) << " (tolerance "
            << csv::number(cfg.compare.tolerance) << ")\n";
        return exit_ok;
    });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Agent-based bathtub model in relative space"};
    app.require_subcommand(1);
    Options opts;
    std::string out_dir;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "Run configuration file")->required();
        sub->add_option("--out", out_dir, "Output directory");
    };

    auto* run = app.add_subcommand("run", "Run one simulation and write its series and travel times");
    add_common(run);
    run->add_option("--engine", opts.engine, "naive or pq");
    run->add_option("--seed", opts.seed, "Demand sampling seed");

    auto* mc = app.add_subcommand("montecarlo", "Monte Carlo batch over derived seeds");
    add_common(mc);
    mc->add_option("--runs", opts.runs, "Number of runs");
    mc->add_option("--seed", opts.seed, "Base seed");

    auto* bench = app.add_subcommand("bench", "Time the engines over a sweep of trip counts");
    bench->add_option("--config", opts.config, "Template configuration (sampled rate demand)");
    bench->add_option("--out", out_dir, "Output directory");
    bench->add_option("--engine", opts.bench_engine, "naive, pq or both");
    bench->add_option("--sizes", opts.sizes, "Trip counts")->delimiter(',');
    bench->add_option("--reps", opts.repetitions, "Timed repetitions per point (>= 5)");
    bench->add_option("--dt-rule", opts.dt_rule, "inflow (dt = 1/(e_bar L_N)) or fixed");

    auto* scale = app.add_subcommand("scale", "Write a flow- or distance-scaled configuration");
    add_common(scale);
    scale->add_option("--ratio", opts.ratio, "Scaling ratio, e.g. 1/10 or 0.5")->required();
    scale->add_option("--mode", opts.mode, "flow or distance");

    auto* compare = app.add_subcommand("compare", "Compare the agent engine with a continuum solver");
    add_common(compare);
    compare->add_option("--oracle", opts.oracle, "vbm, gbm or mm");
    compare->add_option("--seed", opts.seed, "Demand sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    if (!out_dir.empty()) opts.out = out_dir;

    if (run->parsed()) return cmd_run(opts, out, err);
    if (mc->parsed()) return cmd_montecarlo(opts, out, err);
    if (bench->parsed()) return cmd_bench(opts, out, err);
    if (scale->parsed()) return cmd_scale(opts, out, err);
    return cmd_compare(opts, out, err);
}

} // namespace abbm::cli
