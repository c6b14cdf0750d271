#include "skyway/energy.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "skyway/error.hpp"

namespace skyway {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(name) + " must be positive");
  }
}

double checked_sum(std::span<const double> values, const char* what) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw InputError(std::string("negative ") + what);
    total += v;
  }
  return total;
}

}  // namespace

void DroneSpec::validate() const {
  require_positive(weight_g, "weight_g");
  require_positive(max_payload_g, "max_payload_g");
  require_positive(speed_mps, "speed_mps");
  require_positive(max_flight_time_s, "max_flight_time_s");
  require_positive(full_charge_time_s, "full_charge_time_s");
  for (double d : footprint_mm) require_positive(d, "footprint_mm");
}

void ChargeParams::validate() const {
  require_positive(full_charge_time_s, "full_charge_time_s");
  require_positive(beta, "beta");
}

void PowerModel::validate() const {
  require_positive(cruise_drain_pct_per_s, "cruise_drain_pct_per_s");
  require_positive(hover_drain_pct_per_s, "hover_drain_pct_per_s");
  require_positive(recharge_pct_per_s, "recharge_pct_per_s");
  if (!(payload_step >= 0.0)) throw InputError("payload_step must be non-negative");
}

double charge_time(double s_initial, double s_final, const ChargeParams& params) {
  if (!(s_final < 1.0)) throw InputError("charge target must be below 1 (asymptotic curve)");
  if (!(s_initial >= 0.0)) throw InputError("initial charge must be non-negative");
  if (s_final < s_initial) throw InputError("charge target below initial charge");
  if (s_final == s_initial) return 0.0;
  return -params.tau() * std::log((1.0 - s_final) / (1.0 - s_initial));
}

double charge_level_after(double s_initial, double elapsed_s, const ChargeParams& params) {
  return 1.0 - (1.0 - s_initial) * std::exp(-elapsed_s / params.tau());
}

double segment_traverse_time(double length_m, double speed_mps) {
  require_positive(length_m, "segment length");
  require_positive(speed_mps, "speed");
  return length_m / speed_mps;
}

double total_power(std::span<const double> segment_powers, std::span<const double> hover_powers) {
  return checked_sum(segment_powers, "segment power") + checked_sum(hover_powers, "hover power");
}

double delivery_duration(std::span<const double> segment_times,
                         std::span<const double> node_times) {
  return checked_sum(segment_times, "segment time") + checked_sum(node_times, "node time");
}

BatteryState drain(BatteryState battery, double rate_pct_per_s, double dt_s) {
  const double level = battery.level_pct - rate_pct_per_s * dt_s;
  return {std::clamp(level, 0.0, 100.0)};
}

double payload_multiplier(PayloadClass payload, const PowerModel& power) {
  return 1.0 + power.payload_step * static_cast<double>(static_cast<int>(payload));
}

void to_json(nlohmann::json& j, const DroneSpec& v) {
  j = {{"weight_g", v.weight_g},
       {"max_payload_g", v.max_payload_g},
       {"speed_mps", v.speed_mps},
       {"max_flight_time_s", v.max_flight_time_s},
       {"full_charge_time_s", v.full_charge_time_s},
       {"footprint_mm", v.footprint_mm}};
}

void from_json(const nlohmann::json& j, DroneSpec& v) {
  v.weight_g = j.value("weight_g", v.weight_g);
  v.max_payload_g = j.value("max_payload_g", v.max_payload_g);
  v.speed_mps = j.value("speed_mps", v.speed_mps);
  v.max_flight_time_s = j.value("max_flight_time_s", v.max_flight_time_s);
  v.full_charge_time_s = j.value("full_charge_time_s", v.full_charge_time_s);
  v.footprint_mm = j.value("footprint_mm", v.footprint_mm);
}

void to_json(nlohmann::json& j, const ChargeParams& v) {
  j = {{"full_charge_time_s", v.full_charge_time_s}, {"beta", v.beta}};
}

void from_json(const nlohmann::json& j, ChargeParams& v) {
  v.full_charge_time_s = j.value("full_charge_time_s", v.full_charge_time_s);
  v.beta = j.value("beta", v.beta);
}

void to_json(nlohmann::json& j, const PowerModel& v) {
  j = {{"cruise_drain_pct_per_s", v.cruise_drain_pct_per_s},
       {"hover_drain_pct_per_s", v.hover_drain_pct_per_s},
       {"recharge_pct_per_s", v.recharge_pct_per_s},
       {"payload_step", v.payload_step}};
}

void from_json(const nlohmann::json& j, PowerModel& v) {
  v.cruise_drain_pct_per_s = j.value("cruise_drain_pct_per_s", v.cruise_drain_pct_per_s);
  v.hover_drain_pct_per_s = j.value("hover_drain_pct_per_s", v.hover_drain_pct_per_s);
  v.recharge_pct_per_s = j.value("recharge_pct_per_s", v.recharge_pct_per_s);
  v.payload_step = j.value("payload_step", v.payload_step);
}

}  // namespace skyway
