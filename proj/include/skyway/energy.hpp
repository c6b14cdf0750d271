#pragma once

// Solo-flight battery physics: exponential recharge curve, drain, and the
// additive power / duration totals for one delivery.

#include <array>
#include <cmath>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "skyway/categories.hpp"

namespace skyway {

// Crazyflie 2.1 defaults.
struct DroneSpec {
  double weight_g = 27.0;
  double max_payload_g = 15.0;
  double speed_mps = 0.15;
  double max_flight_time_s = 420.0;
  double full_charge_time_s = 2400.0;
  std::array<double, 3> footprint_mm{92.0, 92.0, 29.0};

  void validate() const;
};

// tau = full_charge_time * beta. The default beta makes a 0% -> 99% charge
// take exactly full_charge_time.
struct ChargeParams {
  double full_charge_time_s = 2400.0;
  double beta = 1.0 / std::log(100.0);

  double tau() const { return full_charge_time_s * beta; }
  void validate() const;
};

struct PowerModel {
  double cruise_drain_pct_per_s = 100.0 / 420.0;
  // Hover drain observed on a no-payload drone: 32.7 % over 352 s.
  double hover_drain_pct_per_s = 32.7 / 352.0;
  double recharge_pct_per_s = 99.0 / 2400.0;
  // Each payload class above None scales drain by this fraction.
  double payload_step = 0.17;

  void validate() const;
};

struct BatteryState {
  double level_pct = 100.0;
};

// Seconds to charge from fraction s_initial to s_final (both in [0, 1)).
double charge_time(double s_initial, double s_final, const ChargeParams& params);
// Inverse of charge_time: the charge fraction reached after `elapsed_s`.
double charge_level_after(double s_initial, double elapsed_s, const ChargeParams& params);

double segment_traverse_time(double length_m, double speed_mps);

// Segment plus hover power, in percent of battery.
double total_power(std::span<const double> segment_powers, std::span<const double> hover_powers);
// Segment traversal plus node dwell times, in seconds.
double delivery_duration(std::span<const double> segment_times, std::span<const double> node_times);

BatteryState drain(BatteryState battery, double rate_pct_per_s, double dt_s);

double payload_multiplier(PayloadClass payload, const PowerModel& power);

void to_json(nlohmann::json& j, const DroneSpec& v);
void from_json(const nlohmann::json& j, DroneSpec& v);
void to_json(nlohmann::json& j, const ChargeParams& v);
void from_json(const nlohmann::json& j, ChargeParams& v);
void to_json(nlohmann::json& j, const PowerModel& v);
void from_json(const nlohmann::json& j, PowerModel& v);

}  // namespace skyway
