#pragma once

// Inter-drone interference: factor classification, the segment-level
// interference-ratio model, and the node-level delay model.

#include <array>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skyway/categories.hpp"
#include "skyway/skynet.hpp"

namespace skyway {

// Offsets below which an axis counts as aligned. `travel_axis` orients the
// along-track / cross-track split; it need not be normalised.
struct FormationThresholds {
  double delta_along = 0.1;
  double delta_cross = 0.1;
  double delta_vertical = 0.1;
  Vec3 travel_axis{1.0, 0.0, 0.0};

  void validate() const;
};

// Nearest-anchor bands: [0, 1.5) None, [1.5, 3.75) Light, >= 3.75 Heavy.
PayloadClass classify_payload(double grams, double max_payload_g = 15.0);

// Left-closed bands from 0.3 m; throws InputError below 0.3 m (untested proximity).
SeparationCategory classify_separation(double d_sep);

// Formation of `a` relative to `b`. The offset is split into along-track,
// cross-track (horizontal) and vertical components; exactly one must exceed
// its threshold while the other two stay inside theirs.
FormationClass classify_formation(const Vec3& a, const Vec3& b, const FormationThresholds& th);

// Position of `a` relative to `b` within the given formation.
PositionClass classify_position(FormationClass formation, const Vec3& a, const Vec3& b,
                                const FormationThresholds& th = {});

struct Codebook {
  std::map<PositionClass, double> position;
  std::map<FormationClass, double> formation;
  std::map<WindCondition, double> wind;
  std::map<PayloadClass, double> payload;

  static Codebook defaults();
  friend bool operator==(const Codebook&, const Codebook&) = default;
};

struct FactorVector {
  std::array<double, kVariableCount> codes{};

  double& operator[](Variable v) { return codes[index_of(v)]; }
  double operator[](Variable v) const { return codes[index_of(v)]; }
};

// (1.5 - clamp(d, 0.3, 1.5)) / 1.2: 1 at the closest tested spacing, 0 at the widest.
double separation_code(double d_sep);

FactorVector encode_factors(PositionClass position, double separation_m, FormationClass formation,
                            WindCondition wind, PayloadClass payload, const Codebook& codebook);

// ratio = intercept + sum_v coefficient_v * code_v ^ degree_v
struct SegmentInterferenceModel {
  double intercept = 1.0;
  std::array<double, kVariableCount> coefficients{0.4085, 0.3272, 0.1262, 0.0780, 0.0601};
  std::array<int, kVariableCount> degrees{3, 4, 1, 1, 1};
  Codebook codebook = Codebook::defaults();

  void validate() const;
  friend bool operator==(const SegmentInterferenceModel&,
                         const SegmentInterferenceModel&) = default;
};

// Throws Error if the ratio is not positive (miscalibrated model or codebook).
double predict_ir(const SegmentInterferenceModel& model, const FactorVector& factors);

double interference_power(double expected_power_pct, double ratio);

// Per-variable share of sum |coefficient|, in percent.
std::array<double, kVariableCount> relative_importance(const SegmentInterferenceModel& model);

struct NodeDelayInputs {
  std::vector<double> waiting_times;  // drones on waiting pads, ahead of the hover exit
  std::vector<double> pad_times;      // one entry per occupied recharge pad
  std::vector<double> recharge_times; // the p drones ahead in the recharge queue

  void validate() const;
};

// max(0, sum waiting_times - sum pad_times)
double hover_delay(const NodeDelayInputs& inputs);
// max(0, sum recharge_times - sum pad_times)
double waitpad_delay(const NodeDelayInputs& inputs);
// Seconds of extra recharge needed to recover the charge spent hovering.
double hover_recharge_penalty(double hover_drain_pct_per_s, double hover_s,
                              double recharge_pct_per_s);
double node_wait(double hover_s, double waitpad_s, double hover_penalty_s);
// Seconds needed to recharge `excess_power_pct` at the average recharge rate.
// Negative excess (a beneficial formation) returns negative seconds.
double excess_power_time(double excess_power_pct, double recharge_pct_per_s);

double delivery_time_with_interference(double expected_s, std::span<const double> node_waits,
                                       std::span<const double> segment_penalties);

nlohmann::json codebook_to_json(const Codebook& codebook);
Codebook codebook_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const SegmentInterferenceModel& model);
SegmentInterferenceModel model_from_json(const nlohmann::json& doc);
SegmentInterferenceModel load_model(const std::string& path);

}  // namespace skyway
