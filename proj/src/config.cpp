#include "skyway/config.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "skyway/error.hpp"

namespace skyway {
namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // Avoid "-0.000" in outputs.
  if (std::string_view(buf).find_first_not_of("-0.") == std::string_view::npos) {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, 0.0);
  }
  return buf;
}

std::vector<double> number_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

nlohmann::json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw InputError(what + " file not found");
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + " file is not valid JSON: " + e.what());
  }
}

std::vector<FlightPlan> fleet_from_json(const nlohmann::json& doc, const SkywayNetwork& network) {
  if (!doc.is_array()) throw InputError("fleet must be a JSON array");
  std::vector<FlightPlan> fleet;
  try {
    for (const auto& e : doc) {
      FlightPlan plan = compose_path(network, e.at("source").get<std::string>(),
                                     e.at("destination").get<std::string>());
      plan.drone_id = e.at("drone_id").get<std::string>();
      plan.payload_grams = e.value("payload_grams", 0.0);
      plan.depart_time = e.value("depart_time_s", 0.0);
      plan.lateral_offset = e.value("lateral_offset_m", 0.0);
      plan.vertical_offset = e.value("vertical_offset_m", 0.0);
      plan.initial_battery_pct = e.value("initial_battery_pct", 100.0);
      fleet.push_back(std::move(plan));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed fleet entry: ") + e.what());
  }
  return fleet;
}

std::vector<FlightPlan> load_fleet(const std::string& path, const SkywayNetwork& network) {
  return fleet_from_json(read_json_file(path, "fleet"), network);
}

void apply_config(const nlohmann::json& doc, SimConfig& config) {
  try {
    if (doc.contains("drone")) from_json(doc.at("drone"), config.drone);
    if (doc.contains("charge")) from_json(doc.at("charge"), config.charge);
    if (doc.contains("power")) from_json(doc.at("power"), config.power);
    if (doc.contains("thresholds")) {
      const auto& t = doc.at("thresholds");
      config.thresholds.delta_along = t.value("delta_along", config.thresholds.delta_along);
      config.thresholds.delta_cross = t.value("delta_cross", config.thresholds.delta_cross);
      config.thresholds.delta_vertical =
          t.value("delta_vertical", config.thresholds.delta_vertical);
    }
    if (doc.contains("sim")) {
      const auto& s = doc.at("sim");
      config.sample_dt = s.value("sample_dt", config.sample_dt);
      config.recharge_target = s.value("recharge_target", config.recharge_target);
      config.drain_noise = s.value("drain_noise", config.drain_noise);
    }
    if (doc.contains("codebook")) config.model.codebook = codebook_from_json(doc.at("codebook"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
}

void load_config_file(const std::string& path, SimConfig& config) {
  apply_config(read_json_file(path, "config"), config);
}

PeerSchedule peers_from_json(const nlohmann::json& doc) {
  PeerSchedule peers;
  try {
    if (doc.contains("legs")) {
      for (const auto& l : doc.at("legs")) {
        SegmentPeer p;
        p.position = parse_position(l.value("position", std::string("none")));
        p.formation = parse_formation(l.value("formation", std::string("none")));
        p.separation_m = l.value("separation_m", p.separation_m);
        p.shared_fraction = l.value("shared_fraction", p.shared_fraction);
        peers.legs[l.at("leg").get<std::size_t>()] = p;
      }
    }
    if (doc.contains("nodes")) {
      for (const auto& [id, n] : doc.at("nodes").items()) {
        NodeDelayInputs in;
        in.waiting_times = number_list(n, "waiting_times");
        in.pad_times = number_list(n, "pad_times");
        in.recharge_times = number_list(n, "recharge_times");
        in.validate();
        peers.nodes[id] = in;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed peer schedule: ") + e.what());
  }
  return peers;
}

PeerSchedule load_peers(const std::string& path) {
  return peers_from_json(read_json_file(path, "peers"));
}

void write_trace_csv(std::ostream& out, const FlightRecord& record) {
  out << "t,x,y,z,roll,pitch,yaw,battery_pct,phase,ir\n";
  for (const TraceRow& r : record.rows) {
    out << fmt(r.t, 1) << ',' << fmt(r.position.x, 4) << ',' << fmt(r.position.y, 4) << ','
        << fmt(r.position.z, 4) << ",0.0,0.0,0.0," << fmt(r.battery_pct, 4) << ','
        << to_string(r.phase) << ',' << fmt(r.ir, 4) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<FlightRecord>& records) {
  out << "drone_id,total_power_pct,delivery_time_s,total_wait_s\n";
  for (const FlightRecord& r : records) {
    out << r.drone_id << ',' << fmt(r.summary.total_power_pct, 4) << ','
        << fmt(r.summary.delivery_time_s, 4) << ',' << fmt(r.summary.total_wait_s, 4) << '\n';
  }
}

}  // namespace skyway
