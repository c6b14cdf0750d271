#pragma once

// Flight datasets, interference-ratio extraction, polynomial degree
// selection, least-squares fitting, metrics and ablation.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skyway/categories.hpp"
#include "skyway/interference.hpp"

namespace skyway {

enum class FlightMode { Solo, Simultaneous };
std::string_view to_string(FlightMode mode);
FlightMode parse_mode(std::string_view label);

struct FlightRow {
  std::string flight_id;
  FlightMode mode = FlightMode::Solo;
  FormationClass formation = FormationClass::None;
  PositionClass position = PositionClass::None;
  double separation_m = 1.5;
  double payload_g = 0.0;
  WindCondition wind = WindCondition::None;
  double total_power_pct = 0.0;
  double delivery_time_s = 0.0;
};

struct FlightDataset {
  std::vector<FlightRow> rows;
};

inline constexpr const char* kDatasetHeader =
    "flight_id,mode,formation,position,separation_m,payload_g,wind,total_power_pct,"
    "delivery_time_s";

FlightDataset load_dataset(const std::string& path);
FlightDataset read_dataset(std::istream& in);
void write_dataset(std::ostream& out, const FlightDataset& dataset);

// One matched solo/simultaneous pair.
struct IrRow {
  FactorVector factors;
  double ir = 1.0;
  double solo_power_pct = 0.0;
  double sim_power_pct = 0.0;
  double solo_time_s = 0.0;
  double sim_time_s = 0.0;
};

// Pairs every simultaneous row with the solo row sharing its
// (flight_id, payload_g, wind). Output follows simultaneous-row order.
std::vector<IrRow> extract_ir(const FlightDataset& dataset,
                              const Codebook& codebook = Codebook::defaults(),
                              double max_payload_g = 15.0);

using DegreeMap = std::array<int, kVariableCount>;
using VariableMask = std::array<bool, kVariableCount>;
inline constexpr VariableMask kAllOn{true, true, true, true, true};
inline constexpr DegreeMap kLinear{1, 1, 1, 1, 1};

// Number of fitted parameters for a mask.
std::size_t parameter_count(const VariableMask& mask, bool include_intercept);

// Ordinary least squares on code^degree columns. Variables off in `mask`
// get a zero coefficient. Throws Error on a rank-deficient design and
// InputError when rows <= parameters.
SegmentInterferenceModel polyfit(std::span<const IrRow> rows, const DegreeMap& degrees,
                                 bool include_intercept = true, const VariableMask& mask = kAllOn,
                                 const Codebook& codebook = Codebook::defaults());

double predict_row(const SegmentInterferenceModel& model, const IrRow& row);
double residual_sum_squares(const SegmentInterferenceModel& model, std::span<const IrRow> rows);

// Out-of-fold predictions from k contiguous folds after a seeded shuffle.
std::vector<double> cv_predictions(std::span<const IrRow> rows, const DegreeMap& degrees, int k,
                                   std::uint64_t seed, const VariableMask& mask = kAllOn);
double cv_mae(std::span<const IrRow> rows, const DegreeMap& degrees, int k, std::uint64_t seed,
              const VariableMask& mask = kAllOn);

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};
InformationCriteria information_criteria(double rss, std::size_t n_rows, std::size_t n_params);

struct DegreeScore {
  int degree = 1;
  double mae = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double score = 0.0;
};

struct FitReport {
  DegreeMap degrees = kLinear;
  SegmentInterferenceModel model;
  std::array<std::vector<DegreeScore>, kVariableCount> sweeps;
};

struct SelectOptions {
  std::vector<int> degree_set{1, 2, 3, 4};
  int k = 5;
  std::uint64_t seed = 0;
  VariableMask mask = kAllOn;
};

FitReport select_degrees(std::span<const IrRow> rows, const SelectOptions& options = {});

// Model JSON plus a "selection" block.
nlohmann::json fit_report_to_json(const FitReport& report);

struct MetricsReport {
  double mae = 0.0;
  double mse = 0.0;
  double mape = 0.0;  // percent
  double r2 = 0.0;
};

// R^2 of a constant target is 1 for an exact prediction and 0 otherwise.
MetricsReport evaluate(std::span<const double> targets, std::span<const double> predictions);

// Predicted simultaneous power and delivery time for one pair.
double predicted_power(const SegmentInterferenceModel& model, const IrRow& row);
double predicted_time(const SegmentInterferenceModel& model, const IrRow& row,
                      double recharge_pct_per_s);

struct ValidationReport {
  MetricsReport power;
  MetricsReport time;
};
ValidationReport validate_model(const SegmentInterferenceModel& model, std::span<const IrRow> rows,
                                double recharge_pct_per_s);
void write_validation_csv(std::ostream& out, const ValidationReport& report);

struct AblationRow {
  std::optional<Variable> excluded;  // empty for the all-features baseline
  MetricsReport power;
  MetricsReport time;
};

struct AblationReport {
  DegreeMap degrees = kLinear;
  std::vector<AblationRow> rows;
};

// Baseline with all variables, then one refit per excluded variable using
// the baseline's degrees. Metrics come from out-of-fold predictions.
AblationReport ablate(std::span<const IrRow> rows, const SelectOptions& options,
                      double recharge_pct_per_s);
void write_ablation_csv(std::ostream& out, const AblationReport& report);

struct SynthOptions {
  std::size_t pairs = 1485;
  std::uint64_t seed = 0;
  SegmentInterferenceModel truth;
  double noise_sigma = 0.0;  // additive gaussian noise on the ratio
  double recharge_pct_per_s = 99.0 / 2400.0;
};

// Factors drawn like the hardware campaign: one of the three formations with
// a matching position, separation on the 0.3..1.5 m grid, five winds, three
// payload classes.
std::vector<IrRow> synthesize_ir_rows(const SynthOptions& options);
// The same pairs written as solo + simultaneous dataset rows.
FlightDataset synthesize_dataset(const SynthOptions& options);

}  // namespace skyway
