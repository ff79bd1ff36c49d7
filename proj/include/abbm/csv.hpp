#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abbm/analysis.hpp"
#include "abbm/bench.hpp"
#include "abbm/continuum.hpp"
#include "abbm/demand.hpp"
#include "abbm/nfd.hpp"
#include "abbm/scenario.hpp"

namespace abbm::csv {

// Every real number in CSV output goes through this: 9 significant digits.
std::string number(double value);
std::string number(std::optional<double> value);   // empty cell for none

// Splits one line on commas and trims surrounding blanks from each cell.
std::vector<std::string> split_row(const std::string& line);

// id,depart_time_s,distance_km
void write_trips(const std::filesystem::path& path, const TripTable& trips);
// Rows are re-sorted by departure and re-indexed on load.
TripTable read_trips(const std::filesystem::path& path);

// rho_veh_km,v_km_h
TabulatedNfd read_nfd_table(const std::filesystem::path& path);

// t_s,E,G,delta,rho_veh_km,v_km_h,z_km,m_km
void write_series(const std::filesystem::path& path, const SimOutput& output);
// id,depart_time_s,distance_km,theta_km,completion_time_s
void write_trip_outcomes(const std::filesystem::path& path, std::span<const TravelRecord> records);
// id,depart_time_s,distance_km,theta_km,completion_time_s,travel_time_s
void write_travel_records(const std::filesystem::path& path, std::span<const TravelRecord> records);
// t_s,delta,rho_veh_km,v_km_h,z_km,m_km
void write_continuum(const std::filesystem::path& path, const ContinuumOutput& output, double network_km);
// t_s,mean_delta,std_delta,mean_v,std_v
void write_batch_series(const std::filesystem::path& path, const BatchStats& stats);
// engine,I,L_N_km,dt_s,t_setup_s,t_sim_s,t_post_s
void write_bench(const std::filesystem::path& path, std::span<const BenchPoint> points);

} // namespace abbm::csv
