#include "abbm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "abbm/csv.hpp"
#include "abbm/errors.hpp"

namespace abbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::stringstream ss(s);
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

double parse_number(const std::string& text, const std::string& field) {
    const auto t = trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field, "not a number: '" + t + "'");
    }
}

std::int64_t parse_integer(const std::string& text, const std::string& field) {
    const auto t = trim(text);
    try {
        std::size_t used = 0;
        const long long v = std::stoll(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field, "not an integer: '" + t + "'");
    }
}

std::uint64_t parse_seed(const std::string& text, const std::string& field) {
    const auto t = trim(text);
    try {
        std::size_t used = 0;
        if (!t.empty() && t.front() == '-') throw std::invalid_argument(t);
        const unsigned long long v = std::stoull(t, &used, 0);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field, "not a non-negative integer: '" + t + "'");
    }
}

// Shortest text that reads back to the same double.
std::string exact(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Runs fn, re-labelling any ValidationError as "section.field".
template <class Fn>
auto in_section(const std::string& section, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        if (e.field().find('.') != std::string::npos) throw;
        throw ValidationError(section + "." + e.field(), e.detail());
    }
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& field) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ValidationError(field, "expected a:b, got '" + text + "'");
    return {parse_number(text.substr(0, colon), field), parse_number(text.substr(colon + 1), field)};
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text, const std::string& field) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(text, ',')) {
        if (!item.empty()) out.push_back(parse_pair(item, field));
    }
    return out;
}

DistanceShape parse_shape(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ValidationError("distance", "expected name(args), got '" + text + "'");
    }
    const auto name = trim(text.substr(0, open));
    const auto args = text.substr(open + 1, close - open - 1);
    if (name == "table") {
        DiscreteTable table;
        table.entries = parse_pairs(args, "distance");
        return table;
    }
    std::map<std::string, double> kv;
    for (const auto& item : split(args, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("distance", "expected key=value in '" + text + "'");
        kv[trim(item.substr(0, eq))] = parse_number(item.substr(eq + 1), "distance");
    }
    const auto arg = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ValidationError("distance", name + " needs " + key);
        return it->second;
    };
    if (name == "negexp") return NegExp{arg("mean_km")};
    if (name == "constant") return Constant{arg("d_km")};
    if (name == "lognormal") return LogNormal{arg("mu_log"), arg("sigma_log")};
    throw ValidationError("distance", "unknown distribution '" + name + "'");
}

std::string serialize_shape(const DistanceShape& shape) {
    return std::visit(overloaded{
                          [](const NegExp& d) { return "negexp(mean_km=" + exact(d.mean_km) + ")"; },
                          [](const Constant& d) { return "constant(d_km=" + exact(d.d_km) + ")"; },
                          [](const LogNormal& d) {
                              return "lognormal(mu_log=" + exact(d.mu_log) + ", sigma_log=" + exact(d.sigma_log) + ")";
                          },
                          [](const DiscreteTable& d) {
                              std::string s = "table(";
                              for (std::size_t i = 0; i < d.entries.size(); ++i) {
                                  if (i) s += ", ";
                                  s += exact(d.entries[i].first) + ":" + exact(d.entries[i].second);
                              }
                              return s + ")";
                          },
                      },
                      shape);
}

std::string join_pairs(const std::vector<std::pair<double, double>>& pairs) {
    std::string s;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) s += ", ";
        s += exact(pairs[i].first) + ":" + exact(pairs[i].second);
    }
    return s;
}

Nfd build_nfd(const ConfigDocument& doc) {
    return in_section("nfd", [&]() -> Nfd {
        const auto type = doc.require("nfd", "type");
        const auto num = [&](const std::string& key) { return parse_number(doc.require("nfd", key), key); };
        if (type == "exponential") return ExponentialNfd{num("u_f_km_h"), num("rho_j_veh_km")};
        if (type == "trapezoidal") {
            return TrapezoidalNfd{num("u_f_km_h"), num("capacity_veh_h"), num("w_km_h"), num("rho_j_veh_km")};
        }
        if (type == "tabulated") {
            if (const auto inline_samples = doc.get("nfd", "samples")) {
                return TabulatedNfd{parse_pairs(*inline_samples, "samples")};
            }
            const auto file = doc.require("nfd", "file");
            return csv::read_nfd_table(doc.base_dir() / file);
        }
        throw ValidationError("type", "expected exponential, trapezoidal or tabulated, got '" + type + "'");
    });
}

DemandSpec build_demand(const ConfigDocument& doc) {
    return in_section("demand", [&]() -> DemandSpec {
        const auto type = doc.require("demand", "type");
        if (type == "explicit") return ExplicitDemand{csv::read_trips(doc.base_dir() / doc.require("demand", "file"))};
        if (type != "sampled") throw ValidationError("type", "expected explicit or sampled, got '" + type + "'");

        SampledDemand s{ExplicitTimes{}, parse_distance(doc.require("demand", "distance")), 0};
        const auto departure = doc.require("demand", "departure");
        if (departure == "times") {
            s.departure = ExplicitTimes{parse_number_list(doc.require("demand", "times"), "times")};
        } else if (departure == "rate" || departure == "poisson") {
            auto pieces = parse_rates(doc.require("demand", "rates"));
            const double horizon = parse_number(doc.require("demand", "horizon_s"), "horizon_s");
            if (departure == "rate") {
                s.departure = PiecewiseConstantRate{std::move(pieces), horizon};
            } else {
                s.departure = PoissonProcess{std::move(pieces), horizon};
            }
        } else {
            throw ValidationError("departure", "expected rate, poisson or times, got '" + departure + "'");
        }
        validate(s.departure);
        const auto population = doc.get("demand", "population");
        s.population = population ? parse_integer(*population, "population") : implied_population(s.departure);
        DemandSpec spec = s;
        validate(spec);
        return spec;
    });
}

} // namespace

// --- ConfigDocument -------------------------------------------------------------

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& origin) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            doc.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where, "expected key = value");
        if (section.empty()) throw ValidationError(where, "key outside of any [section]");
        const auto key = trim(line.substr(0, eq));
        if (!doc.sections_[section].emplace(key, trim(line.substr(eq + 1))).second) {
            throw ValidationError(section + "." + key, "given more than once");
        }
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto doc = parse(buf.str(), path.string());
    doc.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return doc;
}

std::optional<std::string> ConfigDocument::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::string ConfigDocument::require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v) throw ValidationError(section + "." + key, "missing");
    return *v;
}

// --- value syntaxes ---------------------------------------------------------------

ContinuumOracle parse_oracle(std::string_view name) {
    if (name == "vbm") return ContinuumOracle::vbm;
    if (name == "gbm") return ContinuumOracle::gbm;
    if (name == "mm") return ContinuumOracle::mm;
    throw ValidationError("oracle", "expected vbm, gbm or mm, got '" + std::string(name) + "'");
}

DistanceDistribution parse_distance(const std::string& text) {
    std::vector<DistanceDistribution::Piece> pieces;
    const auto parts = split(text, ';');
    for (const auto& part : parts) {
        if (part.empty()) continue;
        const auto open = part.find('(');
        const auto colon = part.find(':');
        if (colon != std::string::npos && (open == std::string::npos || colon < open)) {
            pieces.push_back({parse_number(part.substr(0, colon), "distance"), parse_shape(trim(part.substr(colon + 1)))});
        } else {
            pieces.push_back({0.0, parse_shape(part)});
        }
    }
    if (pieces.empty()) throw ValidationError("distance", "empty distribution");
    auto dist = pieces.size() == 1 && pieces.front().t_start_s == 0.0 ? DistanceDistribution(pieces.front().shape)
                                                                       : DistanceDistribution::piecewise(std::move(pieces));
    validate(dist);
    return dist;
}

std::vector<RatePiece> parse_rates(const std::string& text) {
    std::vector<RatePiece> pieces;
    for (auto [t, rate] : parse_pairs(text, "rates")) pieces.push_back({t, rate});
    return pieces;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        if (!item.empty()) out.push_back(parse_number(item, field));
    }
    return out;
}

std::string serialize_distance(const DistanceDistribution& dist) {
    if (dist.time_independent() && dist.pieces().front().t_start_s == 0.0) {
        return serialize_shape(dist.pieces().front().shape);
    }
    std::string s;
    for (const auto& p : dist.pieces()) {
        if (!s.empty()) s += "; ";
        s += exact(p.t_start_s) + ": " + serialize_shape(p.shape);
    }
    return s;
}

// --- RunConfig ----------------------------------------------------------------------

RunConfig build_run_config(const ConfigDocument& doc) {
    RunConfig cfg;
    cfg.scenario.nfd = build_nfd(doc);
    cfg.demand = build_demand(doc);

    in_section("scenario", [&] {
        cfg.scenario.network_km = parse_number(doc.require("scenario", "L_N_km"), "L_N_km");
        cfg.scenario.horizon_s = parse_number(doc.require("scenario", "t_f_s"), "t_f_s");
        const auto dt = doc.require("scenario", "dt_s");
        cfg.dt_auto = dt == "auto";
        if (cfg.dt_auto) {
            const auto trips = std::visit(overloaded{
                                              [](const ExplicitDemand& e) { return static_cast<std::int64_t>(e.trips.size()); },
                                              [](const SampledDemand& s) { return s.population; },
                                          },
                                          cfg.demand);
            cfg.scenario.dt_s = auto_timestep(trips, cfg.scenario.network_km, cfg.scenario.horizon_s);
        } else {
            cfg.scenario.dt_s = parse_number(dt, "dt_s");
        }
        cfg.scenario.validate();
        return 0;
    });

    in_section("demand", [&] {
        if (const auto seed = doc.get("demand", "seed")) cfg.seed = parse_seed(*seed, "seed");
        return 0;
    });

    in_section("run", [&] {
        if (const auto engine = doc.get("run", "engine")) cfg.engine = parse_engine(*engine);
        if (const auto out = doc.get("run", "out")) cfg.out_dir = doc.base_dir() / *out;
        if (const auto runs = doc.get("run", "runs")) {
            cfg.runs = parse_integer(*runs, "runs");
            if (cfg.runs < 1) throw ValidationError("runs", "must be >= 1");
        }
        if (const auto bw = doc.get("run", "bin_width_s")) {
            cfg.bin_width_s = parse_number(*bw, "bin_width_s");
            if (!(cfg.bin_width_s > 0.0)) throw ValidationError("bin_width_s", "must be > 0");
        }
        return 0;
    });

    in_section("compare", [&] {
        auto& c = cfg.compare;
        if (const auto oracle = doc.get("compare", "oracle")) c.oracle = parse_oracle(*oracle);
        if (const auto a = doc.get("compare", "alpha")) c.alpha = parse_number(*a, "alpha");
        if (const auto d = doc.get("compare", "d_star_km")) c.d_star_km = parse_number(*d, "d_star_km");
        if (const auto tol = doc.get("compare", "tolerance")) c.tolerance = parse_number(*tol, "tolerance");
        if (c.alpha < 0.0) throw ValidationError("alpha", "must be >= 0");
        if (!(c.d_star_km > 0.0)) throw ValidationError("d_star_km", "must be > 0");
        if (!(c.tolerance > 0.0)) throw ValidationError("tolerance", "must be > 0");
        return 0;
    });

    const auto& trips = std::get_if<ExplicitDemand>(&cfg.demand);
    if (trips && !trips->trips.empty() && trips->trips.trips().back().depart_time_s > cfg.scenario.horizon_s) {
        throw ValidationError("demand.file", "a trip departs after scenario.t_f_s");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return build_run_config(ConfigDocument::load(path)); }

std::string serialize_config(const RunConfig& cfg, const std::string& trips_file) {
    std::ostringstream out;
    const auto& sc = cfg.scenario;
    out << "[scenario]\n"
        << "L_N_km = " << exact(sc.network_km) << '\n'
        << "t_f_s = " << exact(sc.horizon_s) << '\n'
        << "dt_s = " << (cfg.dt_auto ? std::string("auto") : exact(sc.dt_s)) << "\n\n";

    out << "[nfd]\n";
    std::visit(overloaded{
                   [&](const ExponentialNfd& e) {
                       out << "type = exponential\nu_f_km_h = " << exact(e.u_f_km_h)
                           << "\nrho_j_veh_km = " << exact(e.rho_j_veh_km) << '\n';
                   },
                   [&](const TrapezoidalNfd& t) {
                       out << "type = trapezoidal\nu_f_km_h = " << exact(t.u_f_km_h)
                           << "\ncapacity_veh_h = " << exact(t.capacity_veh_h) << "\nw_km_h = " << exact(t.w_km_h)
                           << "\nrho_j_veh_km = " << exact(t.rho_j_veh_km) << '\n';
                   },
                   [&](const TabulatedNfd& t) { out << "type = tabulated\nsamples = " << join_pairs(t.samples) << '\n'; },
               },
               sc.nfd.form());

    out << "\n[demand]\n";
    std::visit(overloaded{
                   [&](const ExplicitDemand&) { out << "type = explicit\nfile = " << trips_file << '\n'; },
                   [&](const SampledDemand& s) {
                       out << "type = sampled\n";
                       std::visit(overloaded{
                                      [&](const ExplicitTimes& e) {
                                          out << "departure = times\ntimes = ";
                                          for (std::size_t i = 0; i < e.times_s.size(); ++i) {
                                              out << (i ? ", " : "") << exact(e.times_s[i]);
                                          }
                                          out << '\n';
                                      },
                                      [&](const auto& rated) {
                                          constexpr bool poisson = std::is_same_v<std::decay_t<decltype(rated)>, PoissonProcess>;
                                          out << "departure = " << (poisson ? "poisson" : "rate") << "\nrates = ";
                                          for (std::size_t i = 0; i < rated.pieces.size(); ++i) {
                                              out << (i ? ", " : "") << exact(rated.pieces[i].t_start_s) << ':'
                                                  << exact(rated.pieces[i].rate_veh_s);
                                          }
                                          out << "\nhorizon_s = " << exact(rated.horizon_s) << '\n';
                                      },
                                  },
                                  s.departure);
                       out << "distance = " << serialize_distance(s.distance) << '\n'
                           << "population = " << s.population << '\n';
                   },
               },
               cfg.demand);
    out << "seed = " << cfg.seed << "\n\n";

    out << "[run]\n"
        << "engine = " << to_string(cfg.engine) << '\n'
        << "runs = " << cfg.runs << '\n'
        << "bin_width_s = " << exact(cfg.bin_width_s) << "\n\n";

    const char* oracle = cfg.compare.oracle == ContinuumOracle::vbm ? "vbm"
                         : cfg.compare.oracle == ContinuumOracle::gbm ? "gbm"
                                                                       : "mm";
    out << "[compare]\n"
        << "oracle = " << oracle << '\n'
        << "alpha = " << exact(cfg.compare.alpha) << '\n'
        << "d_star_km = " << exact(cfg.compare.d_star_km) << '\n'
        << "tolerance = " << exact(cfg.compare.tolerance) << '\n';
    return out.str();
}

} // namespace abbm
