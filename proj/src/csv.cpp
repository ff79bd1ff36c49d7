#include "abbm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "abbm/errors.hpp"

namespace abbm::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.filename().string(), "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw ValidationError(path.filename().string(), "expected header '" + header + "', got '" + line + "'");
    }
    const auto columns = split_row(header).size();
    std::vector<std::vector<std::string>> rows;
    for (int lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (cells.size() != columns) {
            throw ValidationError(path.filename().string(), "line " + std::to_string(lineno) + " has " +
                                                                std::to_string(cells.size()) + " cells");
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

double parse_double(const std::string& cell, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what, "not a number: '" + cell + "'");
    }
}

} // namespace

std::string number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string number(std::optional<double> value) { return value ? number(*value) : std::string(); }

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

void write_trips(const std::filesystem::path& path, const TripTable& trips) {
    auto out = open_out(path);
    out << "id,depart_time_s,distance_km\n";
    for (const Trip& t : trips) out << t.id << ',' << number(t.depart_time_s) << ',' << number(t.distance_km) << '\n';
    finish(out, path);
}

TripTable read_trips(const std::filesystem::path& path) {
    std::vector<Trip> trips;
    for (const auto& row : read_rows(path, "id,depart_time_s,distance_km")) {
        trips.push_back({0, parse_double(row[1], "depart_time_s"), parse_double(row[2], "distance_km")});
    }
    return sort_by_departure(std::move(trips));
}

TabulatedNfd read_nfd_table(const std::filesystem::path& path) {
    TabulatedNfd table;
    for (const auto& row : read_rows(path, "rho_veh_km,v_km_h")) {
        table.samples.emplace_back(parse_double(row[0], "rho_veh_km"), parse_double(row[1], "v_km_h"));
    }
    return table;
}

void write_series(const std::filesystem::path& path, const SimOutput& output) {
    auto out = open_out(path);
    const auto& s = output.steps;
    out << "t_s,E,G,delta,rho_veh_km,v_km_h,z_km,m_km\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << number(s.t_s[k]) << ',' << s.started[k] << ',' << s.finished[k] << ',' << s.active[k] << ','
            << number(s.rho_veh_km[k]) << ',' << number(s.v_km_h[k]) << ',' << number(s.z_km[k]) << ','
            << number(s.m_km[k]) << '\n';
    }
    finish(out, path);
}

void write_trip_outcomes(const std::filesystem::path& path, std::span<const TravelRecord> records) {
    auto out = open_out(path);
    out << "id,depart_time_s,distance_km,theta_km,completion_time_s\n";
    for (const auto& r : records) {
        out << r.trip_id << ',' << number(r.depart_time_s) << ',' << number(r.distance_km) << ','
            << number(r.theta_km) << ',' << number(r.completion_time_s) << '\n';
    }
    finish(out, path);
}

void write_travel_records(const std::filesystem::path& path, std::span<const TravelRecord> records) {
    auto out = open_out(path);
    out << "id,depart_time_s,distance_km,theta_km,completion_time_s,travel_time_s\n";
    for (const auto& r : records) {
        out << r.trip_id << ',' << number(r.depart_time_s) << ',' << number(r.distance_km) << ','
            << number(r.theta_km) << ',' << number(r.completion_time_s) << ',' << number(r.travel_time_s) << '\n';
    }
    finish(out, path);
}

void write_continuum(const std::filesystem::path& path, const ContinuumOutput& output, double network_km) {
    auto out = open_out(path);
    out << "t_s,delta,rho_veh_km,v_km_h,z_km,m_km\n";
    for (std::size_t k = 0; k < output.size(); ++k) {
        out << number(output.t_s[k]) << ',' << number(output.delta[k]) << ',' << number(output.delta[k] / network_km)
            << ',' << number(output.v_km_h[k]) << ',' << number(output.z_km[k]) << ','
            << (output.m_km.empty() ? std::string() : number(output.m_km[k])) << '\n';
    }
    finish(out, path);
}

void write_batch_series(const std::filesystem::path& path, const BatchStats& stats) {
    auto out = open_out(path);
    out << "t_s,mean_delta,std_delta,mean_v,std_v\n";
    for (std::size_t k = 0; k < stats.t_s.size(); ++k) {
        out << number(stats.t_s[k]) << ',' << number(stats.mean_delta[k]) << ',' << number(stats.std_delta[k]) << ','
            << number(stats.mean_v[k]) << ',' << number(stats.std_v[k]) << '\n';
    }
    finish(out, path);
}

void write_bench(const std::filesystem::path& path, std::span<const BenchPoint> points) {
    auto out = open_out(path);
    out << "engine,I,L_N_km,dt_s,t_setup_s,t_sim_s,t_post_s\n";
    for (const auto& p : points) {
        out << to_string(p.engine) << ',' << p.trips << ',' << number(p.network_km) << ',' << number(p.dt_s) << ','
            << number(p.t_setup_s) << ',' << number(p.t_sim_s) << ',' << number(p.t_post_s) << '\n';
    }
    finish(out, path);
}

} // namespace abbm::csv
