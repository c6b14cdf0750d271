#include "skyway/interference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "skyway/error.hpp"

namespace skyway {
namespace {

constexpr double kMinTestedSeparation = 0.3;
constexpr double kMaxTestedSeparation = 1.5;

struct TrackFrame {
  Vec3 along;
  Vec3 cross;
};

// Horizontal along-track axis and its left-hand cross-track axis.
TrackFrame track_frame(const Vec3& travel) {
  Vec3 along{travel.x, travel.y, 0.0};
  const double n = along.norm();
  along = n > 1e-12 ? (1.0 / n) * along : Vec3{1.0, 0.0, 0.0};
  return {along, Vec3{-along.y, along.x, 0.0}};
}

double sum_checked(std::span<const double> values, const char* what) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw InputError(std::string("negative ") + what);
    total += v;
  }
  return total;
}

template <typename E>
double code_for(const std::map<E, double>& table, E key) {
  auto it = table.find(key);
  if (it == table.end()) {
    throw InputError("codebook has no entry for '" + std::string(to_string(key)) + "'");
  }
  return it->second;
}

template <typename E, typename Parse>
std::map<E, double> table_from_json(const nlohmann::json& j, Parse parse) {
  std::map<E, double> out;
  for (const auto& [label, code] : j.items()) out[parse(label)] = code.template get<double>();
  return out;
}

template <typename E>
nlohmann::json table_to_json(const std::map<E, double>& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, code] : table) j[std::string(to_string(key))] = code;
  return j;
}

}  // namespace

void FormationThresholds::validate() const {
  if (!(delta_along > 0.0 && delta_cross > 0.0 && delta_vertical > 0.0)) {
    throw InputError("formation thresholds must be positive");
  }
  if (!travel_axis.finite()) throw InputError("travel axis must be finite");
}

PayloadClass classify_payload(double grams, double max_payload_g) {
  if (!(grams >= 0.0)) throw InputError("payload weight must be non-negative");
  if (grams > max_payload_g) throw InputError("payload exceeds drone capacity");
  if (grams < 1.5) return PayloadClass::None;
  if (grams < 3.75) return PayloadClass::Light;
  return PayloadClass::Heavy;
}

SeparationCategory classify_separation(double d_sep) {
  if (!(d_sep >= kMinTestedSeparation)) {
    throw InputError("untested proximity: separation below 0.3 m");
  }
  if (d_sep < 0.5) return SeparationCategory::Close;
  if (d_sep < 0.7) return SeparationCategory::Moderate;
  return SeparationCategory::Wide;
}

FormationClass classify_formation(const Vec3& a, const Vec3& b, const FormationThresholds& th) {
  const TrackFrame frame = track_frame(th.travel_axis);
  const Vec3 d = a - b;
  const double along = std::abs(d.dot(frame.along));
  const double cross = std::abs(d.dot(frame.cross));
  const double vert = std::abs(d.z);

  if (vert > th.delta_vertical && along < th.delta_along && cross < th.delta_cross) {
    return FormationClass::TopDown;
  }
  if (along > th.delta_along && cross < th.delta_cross && vert < th.delta_vertical) {
    return FormationClass::FrontBack;
  }
  if (cross > th.delta_cross && along < th.delta_along && vert < th.delta_vertical) {
    return FormationClass::SideBySide;
  }
  return FormationClass::None;
}

PositionClass classify_position(FormationClass formation, const Vec3& a, const Vec3& b,
                                const FormationThresholds& th) {
  const TrackFrame frame = track_frame(th.travel_axis);
  const Vec3 d = a - b;
  switch (formation) {
    case FormationClass::TopDown:
      if (d.z > 0.0) return PositionClass::Top;
      if (d.z < 0.0) return PositionClass::Down;
      break;
    case FormationClass::FrontBack: {
      const double along = d.dot(frame.along);
      if (along > 0.0) return PositionClass::Front;
      if (along < 0.0) return PositionClass::Back;
      break;
    }
    case FormationClass::SideBySide: {
      const double cross = d.dot(frame.cross);
      if (cross > 0.0) return PositionClass::Left;
      if (cross < 0.0) return PositionClass::Right;
      break;
    }
    case FormationClass::None:
      break;
  }
  return PositionClass::None;
}

Codebook Codebook::defaults() {
  Codebook cb;
  cb.position = {{PositionClass::None, 0.0},   {PositionClass::Front, -1.0},
                 {PositionClass::Top, -0.25},  {PositionClass::Left, 0.25},
                 {PositionClass::Right, 0.25}, {PositionClass::Back, 0.6},
                 {PositionClass::Down, 1.0}};
  cb.formation = {{FormationClass::None, 0.0},
                  {FormationClass::SideBySide, 0.33},
                  {FormationClass::FrontBack, 0.66},
                  {FormationClass::TopDown, 1.0}};
  cb.wind = {{WindCondition::None, 0.0},
             {WindCondition::LightTailwind, 0.25},
             {WindCondition::IntenseTailwind, 0.4},
             {WindCondition::LightHeadwind, 0.6},
             {WindCondition::IntenseHeadwind, 1.0}};
  cb.payload = {{PayloadClass::None, 0.0}, {PayloadClass::Light, 0.5}, {PayloadClass::Heavy, 1.0}};
  return cb;
}

double separation_code(double d_sep) {
  const double d = std::clamp(d_sep, kMinTestedSeparation, kMaxTestedSeparation);
  return (kMaxTestedSeparation - d) / (kMaxTestedSeparation - kMinTestedSeparation);
}

FactorVector encode_factors(PositionClass position, double separation_m, FormationClass formation,
                            WindCondition wind, PayloadClass payload, const Codebook& codebook) {
  FactorVector f;
  f[Variable::Position] = code_for(codebook.position, position);
  f[Variable::Separation] = separation_code(separation_m);
  f[Variable::Formation] = code_for(codebook.formation, formation);
  f[Variable::Wind] = code_for(codebook.wind, wind);
  f[Variable::Payload] = code_for(codebook.payload, payload);
  return f;
}

void SegmentInterferenceModel::validate() const {
  for (int d : degrees) {
    if (d < 1 || d > 4) throw InputError("polynomial degrees must lie in 1..4");
  }
  if (!std::isfinite(intercept)) throw InputError("intercept must be finite");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw InputError("coefficients must be finite");
  }
}

double predict_ir(const SegmentInterferenceModel& model, const FactorVector& factors) {
  double ratio = model.intercept;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    ratio += model.coefficients[v] * std::pow(factors.codes[v], model.degrees[v]);
  }
  if (!(ratio > 0.0)) {
    throw Error("nonpositive interference ratio; model or codebook is miscalibrated");
  }
  return ratio;
}

double interference_power(double expected_power_pct, double ratio) {
  return expected_power_pct * ratio;
}

std::array<double, kVariableCount> relative_importance(const SegmentInterferenceModel& model) {
  std::array<double, kVariableCount> share{};
  double total = 0.0;
  for (std::size_t v = 0; v < kVariableCount; ++v) total += std::abs(model.coefficients[v]);
  if (!(total > 0.0)) throw InputError("relative importance of an all-zero model");
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    share[v] = 100.0 * std::abs(model.coefficients[v]) / total;
  }
  return share;
}

void NodeDelayInputs::validate() const {
  sum_checked(waiting_times, "waiting time");
  sum_checked(pad_times, "pad time");
  sum_checked(recharge_times, "recharge time");
}

double hover_delay(const NodeDelayInputs& inputs) {
  const double waiting = sum_checked(inputs.waiting_times, "waiting time");
  const double pads = sum_checked(inputs.pad_times, "pad time");
  return std::max(0.0, waiting - pads);
}

double waitpad_delay(const NodeDelayInputs& inputs) {
  const double ahead = sum_checked(inputs.recharge_times, "recharge time");
  const double pads = sum_checked(inputs.pad_times, "pad time");
  return std::max(0.0, ahead - pads);
}

double hover_recharge_penalty(double hover_drain_pct_per_s, double hover_s,
                              double recharge_pct_per_s) {
  if (!(recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  if (!(hover_drain_pct_per_s > 0.0)) throw InputError("hover drain rate must be positive");
  if (!(hover_s >= 0.0)) throw InputError("hover time must be non-negative");
  return hover_drain_pct_per_s * hover_s / recharge_pct_per_s;
}

double node_wait(double hover_s, double waitpad_s, double hover_penalty_s) {
  if (!(hover_s >= 0.0 && waitpad_s >= 0.0 && hover_penalty_s >= 0.0)) {
    throw InputError("node wait components must be non-negative");
  }
  return hover_s + waitpad_s + hover_penalty_s;
}

double excess_power_time(double excess_power_pct, double recharge_pct_per_s) {
  if (!(recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  return excess_power_pct / recharge_pct_per_s;
}

double delivery_time_with_interference(double expected_s, std::span<const double> node_waits,
                                       std::span<const double> segment_penalties) {
  if (!(expected_s >= 0.0)) throw InputError("expected delivery time must be non-negative");
  double total = expected_s + sum_checked(node_waits, "node wait");
  for (double p : segment_penalties) total += p;
  return total;
}

nlohmann::json codebook_to_json(const Codebook& codebook) {
  return {{"position", table_to_json(codebook.position)},
          {"formation", table_to_json(codebook.formation)},
          {"wind", table_to_json(codebook.wind)},
          {"payload", table_to_json(codebook.payload)}};
}

Codebook codebook_from_json(const nlohmann::json& doc) {
  Codebook cb;
  cb.position = table_from_json<PositionClass>(doc.at("position"), parse_position);
  cb.formation = table_from_json<FormationClass>(doc.at("formation"), parse_formation);
  cb.wind = table_from_json<WindCondition>(doc.at("wind"), parse_wind);
  cb.payload = table_from_json<PayloadClass>(doc.at("payload"), parse_payload);
  return cb;
}

nlohmann::json model_to_json(const SegmentInterferenceModel& model) {
  nlohmann::json degrees = nlohmann::json::object();
  nlohmann::json coefficients = nlohmann::json::object();
  for (Variable v : kAllVariables) {
    degrees[std::string(to_string(v))] = model.degrees[index_of(v)];
    coefficients[std::string(to_string(v))] = model.coefficients[index_of(v)];
  }
  return {{"intercept", model.intercept},
          {"degrees", degrees},
          {"coefficients", coefficients},
          {"codebook", codebook_to_json(model.codebook)}};
}

SegmentInterferenceModel model_from_json(const nlohmann::json& doc) {
  try {
    SegmentInterferenceModel model;
    model.intercept = doc.at("intercept").get<double>();
    for (Variable v : kAllVariables) {
      const std::string key(to_string(v));
      model.degrees[index_of(v)] = doc.at("degrees").at(key).get<int>();
      model.coefficients[index_of(v)] = doc.at("coefficients").at(key).get<double>();
    }
    if (doc.contains("codebook")) model.codebook = codebook_from_json(doc.at("codebook"));
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

SegmentInterferenceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("model file not found");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace skyway
