#pragma once

// JSON inputs for the simulator (fleet, drone config, peer schedule) and
// the CSV outputs it produces.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skyway/simkernel.hpp"

namespace skyway {

// Fleet entries: {drone_id, source, destination, payload_grams, depart_time_s}
// plus optional lateral_offset_m, vertical_offset_m, initial_battery_pct.
// Routes are the shortest paths through the network.
std::vector<FlightPlan> fleet_from_json(const nlohmann::json& doc, const SkywayNetwork& network);
std::vector<FlightPlan> load_fleet(const std::string& path, const SkywayNetwork& network);

// Overlays "drone", "charge", "power", "thresholds", "sim" and "codebook"
// sections onto `config`; absent keys keep their current values.
void apply_config(const nlohmann::json& doc, SimConfig& config);
void load_config_file(const std::string& path, SimConfig& config);

// {"legs": [{leg, position, formation, separation_m, shared_fraction}],
//  "nodes": {"<id>": {waiting_times, pad_times, recharge_times}}}
PeerSchedule peers_from_json(const nlohmann::json& doc);
PeerSchedule load_peers(const std::string& path);

nlohmann::json read_json_file(const std::string& path, const std::string& what);

void write_trace_csv(std::ostream& out, const FlightRecord& record);
void write_summary_csv(std::ostream& out, const std::vector<FlightRecord>& records);

}  // namespace skyway
