#include "skyway/fitlab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "skyway/error.hpp"

namespace skyway {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const char* column, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(line) + ": unparseable " + column + " '" + text +
                     "'");
  }
  return v;
}

Eigen::MatrixXd design_matrix(std::span<const IrRow> rows, const DegreeMap& degrees,
                              bool include_intercept, const VariableMask& mask) {
  const auto cols = static_cast<Eigen::Index>(parameter_count(mask, include_intercept));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index c = 0;
    if (include_intercept) X(static_cast<Eigen::Index>(r), c++) = 1.0;
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      if (!mask[v]) continue;
      X(static_cast<Eigen::Index>(r), c++) = std::pow(rows[r].factors.codes[v], degrees[v]);
    }
  }
  return X;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

void min_max_normalize(std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double span = *hi - *lo;
  for (double& v : values) v = span > 0.0 ? (v - min) / span : 0.0;
}

void write_metrics(std::ostream& out, const MetricsReport& m) {
  out << m.mae << ',' << m.mse << ',' << m.mape << ',' << m.r2;
}

}  // namespace

std::string_view to_string(FlightMode mode) {
  return mode == FlightMode::Solo ? "solo" : "simultaneous";
}

FlightMode parse_mode(std::string_view label) {
  if (label == "solo") return FlightMode::Solo;
  if (label == "simultaneous") return FlightMode::Simultaneous;
  throw InputError("unknown mode '" + std::string(label) + "' (valid: solo, simultaneous)");
}

// ---------------------------------------------------------------------------
// Dataset I/O

FlightDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  const auto expected = split_csv(kDatasetHeader);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const auto& name : expected) {
    if (!column.contains(name)) throw InputError("dataset missing column '" + name + "'");
  }

  FlightDataset ds;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    auto at = [&](const char* name) -> const std::string& { return f[column.at(name)]; };
    FlightRow row;
    row.flight_id = at("flight_id");
    row.mode = parse_mode(at("mode"));
    row.formation = parse_formation(at("formation"));
    row.position = parse_position(at("position"));
    row.separation_m = parse_number(at("separation_m"), "separation_m", line_no);
    row.payload_g = parse_number(at("payload_g"), "payload_g", line_no);
    row.wind = parse_wind(at("wind"));
    row.total_power_pct = parse_number(at("total_power_pct"), "total_power_pct", line_no);
    row.delivery_time_s = parse_number(at("delivery_time_s"), "delivery_time_s", line_no);
    if (row.separation_m < 0.0 || row.payload_g < 0.0 || row.total_power_pct < 0.0 ||
        row.delivery_time_s < 0.0) {
      throw InputError("line " + std::to_string(line_no) + ": negative value");
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

FlightDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("dataset file not found");
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const FlightDataset& dataset) {
  out << kDatasetHeader << '\n';
  out << std::setprecision(15);
  for (const FlightRow& r : dataset.rows) {
    out << r.flight_id << ',' << to_string(r.mode) << ',' << to_string(r.formation) << ','
        << to_string(r.position) << ',' << r.separation_m << ',' << r.payload_g << ','
        << to_string(r.wind) << ',' << r.total_power_pct << ',' << r.delivery_time_s << '\n';
  }
}

// ---------------------------------------------------------------------------
// IR extraction

std::vector<IrRow> extract_ir(const FlightDataset& dataset, const Codebook& codebook,
                              double max_payload_g) {
  using Key = std::tuple<std::string, double, WindCondition>;
  std::map<Key, const FlightRow*> solo;
  for (const FlightRow& r : dataset.rows) {
    if (r.mode != FlightMode::Solo) continue;
    if (!solo.emplace(Key{r.flight_id, r.payload_g, r.wind}, &r).second) {
      throw InputError("duplicate solo row for flight '" + r.flight_id + "'");
    }
  }
  std::vector<IrRow> out;
  for (const FlightRow& r : dataset.rows) {
    if (r.mode != FlightMode::Simultaneous) continue;
    auto it = solo.find(Key{r.flight_id, r.payload_g, r.wind});
    if (it == solo.end()) {
      throw InputError("simultaneous flight '" + r.flight_id + "' has no matching solo row");
    }
    const FlightRow& s = *it->second;
    if (!(s.total_power_pct > 0.0)) {
      throw InputError("solo flight '" + s.flight_id + "' has zero power");
    }
    IrRow row;
    row.factors = encode_factors(r.position, r.separation_m, r.formation, r.wind,
                                 classify_payload(r.payload_g, max_payload_g), codebook);
    row.ir = r.total_power_pct / s.total_power_pct;
    row.solo_power_pct = s.total_power_pct;
    row.sim_power_pct = r.total_power_pct;
    row.solo_time_s = s.delivery_time_s;
    row.sim_time_s = r.delivery_time_s;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fitting

std::size_t parameter_count(const VariableMask& mask, bool include_intercept) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)) +
         (include_intercept ? 1 : 0);
}

SegmentInterferenceModel polyfit(std::span<const IrRow> rows, const DegreeMap& degrees,
                                 bool include_intercept, const VariableMask& mask,
                                 const Codebook& codebook) {
  for (int d : degrees) {
    if (d < 1 || d > 4) throw InputError("polynomial degrees must lie in 1..4");
  }
  const std::size_t p = parameter_count(mask, include_intercept);
  if (p == 0) throw InputError("nothing to fit");
  if (rows.size() <= p) {
    throw InputError("insufficient rows: " + std::to_string(rows.size()) + " rows for " +
                     std::to_string(p) + " parameters");
  }
  const Eigen::MatrixXd X = design_matrix(rows, degrees, include_intercept, mask);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = rows[r].ir;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    throw Error("rank-deficient design matrix (rank " + std::to_string(qr.rank()) + " of " +
                std::to_string(X.cols()) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(y);

  SegmentInterferenceModel model;
  model.codebook = codebook;
  model.degrees = degrees;
  model.coefficients.fill(0.0);
  Eigen::Index c = 0;
  model.intercept = include_intercept ? beta(c++) : 0.0;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    if (mask[v]) model.coefficients[v] = beta(c++);
  }
  return model;
}

double predict_row(const SegmentInterferenceModel& model, const IrRow& row) {
  double y = model.intercept;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    y += model.coefficients[v] * std::pow(row.factors.codes[v], model.degrees[v]);
  }
  return y;
}

double residual_sum_squares(const SegmentInterferenceModel& model, std::span<const IrRow> rows) {
  double rss = 0.0;
  for (const IrRow& r : rows) {
    const double e = r.ir - predict_row(model, r);
    rss += e * e;
  }
  return rss;
}

std::vector<double> cv_predictions(std::span<const IrRow> rows, const DegreeMap& degrees, int k,
                                   std::uint64_t seed, const VariableMask& mask) {
  if (k < 2) throw InputError("cross-validation needs k >= 2");
  if (rows.size() < static_cast<std::size_t>(k)) {
    throw InputError("too few rows for " + std::to_string(k) + "-fold cross-validation");
  }
  const std::size_t n = rows.size();
  const auto order = shuffled_indices(n, seed);
  std::vector<double> out(n, 0.0);
  std::vector<IrRow> train;
  train.reserve(n);
  for (int fold = 0; fold < k; ++fold) {
    const std::size_t lo = n * static_cast<std::size_t>(fold) / static_cast<std::size_t>(k);
    const std::size_t hi = n * static_cast<std::size_t>(fold + 1) / static_cast<std::size_t>(k);
    train.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i < lo || i >= hi) train.push_back(rows[order[i]]);
    }
    const auto model = polyfit(train, degrees, true, mask);
    for (std::size_t i = lo; i < hi; ++i) out[order[i]] = predict_row(model, rows[order[i]]);
  }
  return out;
}

double cv_mae(std::span<const IrRow> rows, const DegreeMap& degrees, int k, std::uint64_t seed,
              const VariableMask& mask) {
  const auto pred = cv_predictions(rows, degrees, k, seed, mask);
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) total += std::abs(rows[i].ir - pred[i]);
  return total / static_cast<double>(rows.size());
}

InformationCriteria information_criteria(double rss, std::size_t n_rows, std::size_t n_params) {
  if (!(rss >= 0.0)) throw InputError("rss must be non-negative");
  if (n_rows <= n_params) throw InputError("information criteria need more rows than parameters");
  const double n = static_cast<double>(n_rows);
  const double k = static_cast<double>(n_params);
  const double fit = n * std::log(std::max(rss / n, 1e-300));
  return {fit + 2.0 * k, fit + k * std::log(n)};
}

FitReport select_degrees(std::span<const IrRow> rows, const SelectOptions& options) {
  if (options.degree_set.empty()) throw InputError("empty degree set");
  FitReport report;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    if (!options.mask[v]) continue;
    std::vector<double> mae;
    std::vector<double> aic;
    std::vector<double> bic;
    for (int d : options.degree_set) {
      DegreeMap degrees = kLinear;
      degrees[v] = d;
      mae.push_back(cv_mae(rows, degrees, options.k, options.seed, options.mask));
      const auto model = polyfit(rows, degrees, true, options.mask);
      const auto ic = information_criteria(residual_sum_squares(model, rows), rows.size(),
                                           parameter_count(options.mask, true));
      aic.push_back(ic.aic);
      bic.push_back(ic.bic);
    }
    auto n_mae = mae;
    auto n_aic = aic;
    auto n_bic = bic;
    min_max_normalize(n_mae);
    min_max_normalize(n_aic);
    min_max_normalize(n_bic);

    std::size_t best = 0;
    auto& sweep = report.sweeps[v];
    for (std::size_t i = 0; i < options.degree_set.size(); ++i) {
      const double s = (n_mae[i] + n_aic[i] + n_bic[i]) / 3.0;
      sweep.push_back({options.degree_set[i], mae[i], aic[i], bic[i], s});
      const bool better = s < sweep[best].score ||
                          (s == sweep[best].score && sweep[i].degree < sweep[best].degree);
      if (better) best = i;
    }
    report.degrees[v] = sweep[best].degree;
  }
  report.model = polyfit(rows, report.degrees, true, options.mask);
  return report;
}

nlohmann::json fit_report_to_json(const FitReport& report) {
  nlohmann::json doc = model_to_json(report.model);
  nlohmann::json selection = nlohmann::json::object();
  for (Variable v : kAllVariables) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const DegreeScore& s : report.sweeps[index_of(v)]) {
      sweep.push_back(
          {{"degree", s.degree}, {"mae", s.mae}, {"aic", s.aic}, {"bic", s.bic}, {"score", s.score}});
    }
    selection[std::string(to_string(v))] = sweep;
  }
  doc["selection"] = selection;
  return doc;
}

// ---------------------------------------------------------------------------
// Metrics

MetricsReport evaluate(std::span<const double> targets, std::span<const double> predictions) {
  if (targets.size() != predictions.size()) throw InputError("length mismatch");
  if (targets.empty()) throw InputError("no values to evaluate");
  const double n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double pct_sum = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == 0.0) throw InputError("MAPE undefined for a zero target");
    const double e = targets[i] - predictions[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    pct_sum += std::abs(e / targets[i]);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  MetricsReport m;
  m.mae = abs_sum / n;
  m.mse = sq_sum / n;
  m.mape = 100.0 * pct_sum / n;
  if (ss_tot > 0.0) {
    m.r2 = 1.0 - sq_sum / ss_tot;
  } else {
    m.r2 = sq_sum == 0.0 ? 1.0 : 0.0;
  }
  return m;
}

double predicted_power(const SegmentInterferenceModel& model, const IrRow& row) {
  return row.solo_power_pct * predict_row(model, row);
}

double predicted_time(const SegmentInterferenceModel& model, const IrRow& row,
                      double recharge_pct_per_s) {
  if (!(recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  const double excess = row.solo_power_pct * (predict_row(model, row) - 1.0);
  return row.solo_time_s + excess / recharge_pct_per_s;
}

namespace {

ValidationReport score_pairs(std::span<const IrRow> rows, std::span<const double> ir_pred,
                             double recharge_pct_per_s) {
  std::vector<double> power;
  std::vector<double> power_hat;
  std::vector<double> time;
  std::vector<double> time_hat;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    power.push_back(rows[i].sim_power_pct);
    power_hat.push_back(rows[i].solo_power_pct * ir_pred[i]);
    time.push_back(rows[i].sim_time_s);
    time_hat.push_back(rows[i].solo_time_s +
                       rows[i].solo_power_pct * (ir_pred[i] - 1.0) / recharge_pct_per_s);
  }
  return {evaluate(power, power_hat), evaluate(time, time_hat)};
}

}  // namespace

ValidationReport validate_model(const SegmentInterferenceModel& model, std::span<const IrRow> rows,
                                double recharge_pct_per_s) {
  if (!(recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  std::vector<double> ir_pred;
  for (const IrRow& r : rows) ir_pred.push_back(predict_row(model, r));
  return score_pairs(rows, ir_pred, recharge_pct_per_s);
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "target,mae,mse,mape,r2\n" << std::setprecision(10);
  out << "power,";
  write_metrics(out, report.power);
  out << "\ntime,";
  write_metrics(out, report.time);
  out << '\n';
}

// ---------------------------------------------------------------------------
// Ablation

AblationReport ablate(std::span<const IrRow> rows, const SelectOptions& options,
                      double recharge_pct_per_s) {
  if (!(recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  if (std::count(options.mask.begin(), options.mask.end(), true) < 2) {
    throw InputError("ablation needs at least two variables");
  }
  if (rows.empty()) throw InputError("dataset has no usable rows");
  AblationReport report;
  report.degrees = select_degrees(rows, options).degrees;

  auto run = [&](const VariableMask& mask) {
    const auto pred = cv_predictions(rows, report.degrees, options.k, options.seed, mask);
    return score_pairs(rows, pred, recharge_pct_per_s);
  };
  const auto base = run(options.mask);
  report.rows.push_back({std::nullopt, base.power, base.time});
  for (Variable v : kAllVariables) {
    if (!options.mask[index_of(v)]) continue;
    VariableMask mask = options.mask;
    mask[index_of(v)] = false;
    const auto r = run(mask);
    report.rows.push_back({v, r.power, r.time});
  }
  return report;
}

void write_ablation_csv(std::ostream& out, const AblationReport& report) {
  out << "excluded,power_mae,power_mse,power_mape,power_r2,time_mae,time_mse,time_mape,time_r2\n"
      << std::setprecision(10);
  for (const AblationRow& row : report.rows) {
    out << (row.excluded ? to_string(*row.excluded) : std::string_view("none")) << ',';
    write_metrics(out, row.power);
    out << ',';
    write_metrics(out, row.time);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic campaign

namespace {

struct SynthDraw {
  FormationClass formation;
  PositionClass position;
  double separation_m;
  WindCondition wind;
  double payload_g;
  double solo_power_pct;
  double solo_time_s;
  double ir;
};

std::vector<SynthDraw> draw_campaign(const SynthOptions& o) {
  static constexpr std::array<std::pair<FormationClass, std::array<PositionClass, 2>>, 3> kPairs{{
      {FormationClass::SideBySide, {PositionClass::Left, PositionClass::Right}},
      {FormationClass::FrontBack, {PositionClass::Front, PositionClass::Back}},
      {FormationClass::TopDown, {PositionClass::Top, PositionClass::Down}},
  }};
  static constexpr std::array<WindCondition, 5> kWinds{
      WindCondition::None, WindCondition::LightHeadwind, WindCondition::LightTailwind,
      WindCondition::IntenseHeadwind, WindCondition::IntenseTailwind};
  static constexpr std::array<double, 3> kPayloads{0.0, 3.0, 4.5};

  o.truth.validate();
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> pick3(0, 2);
  std::uniform_int_distribution<int> pick2(0, 1);
  std::uniform_int_distribution<int> pick5(0, 4);
  std::uniform_int_distribution<int> pick_sep(3, 15);
  std::uniform_real_distribution<double> base_power(8.0, 14.0);
  std::uniform_real_distribution<double> base_time(600.0, 1200.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<SynthDraw> out;
  out.reserve(o.pairs);
  for (std::size_t i = 0; i < o.pairs; ++i) {
    SynthDraw d{};
    const auto& pair = kPairs[static_cast<std::size_t>(pick3(rng))];
    d.formation = pair.first;
    d.position = pair.second[static_cast<std::size_t>(pick2(rng))];
    d.separation_m = pick_sep(rng) / 10.0;
    d.wind = kWinds[static_cast<std::size_t>(pick5(rng))];
    d.payload_g = kPayloads[static_cast<std::size_t>(pick3(rng))];
    d.solo_power_pct = base_power(rng);
    d.solo_time_s = base_time(rng);
    const FactorVector f = encode_factors(d.position, d.separation_m, d.formation, d.wind,
                                          classify_payload(d.payload_g), o.truth.codebook);
    d.ir = predict_ir(o.truth, f);
    if (o.noise_sigma > 0.0) d.ir += o.noise_sigma * gauss(rng);
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<IrRow> synthesize_ir_rows(const SynthOptions& options) {
  if (!(options.recharge_pct_per_s > 0.0)) throw InputError("recharge rate must be positive");
  std::vector<IrRow> rows;
  for (const SynthDraw& d : draw_campaign(options)) {
    IrRow r;
    r.factors = encode_factors(d.position, d.separation_m, d.formation, d.wind,
                               classify_payload(d.payload_g), options.truth.codebook);
    r.ir = d.ir;
    r.solo_power_pct = d.solo_power_pct;
    r.sim_power_pct = d.solo_power_pct * d.ir;
    r.solo_time_s = d.solo_time_s;
    r.sim_time_s = d.solo_time_s + d.solo_power_pct * (d.ir - 1.0) / options.recharge_pct_per_s;
    rows.push_back(r);
  }
  return rows;
}

FlightDataset synthesize_dataset(const SynthOptions& options) {
  const auto rows = synthesize_ir_rows(options);
  const auto draws = draw_campaign(options);
  FlightDataset ds;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    std::ostringstream id;
    id << 'f' << std::setw(5) << std::setfill('0') << i + 1;
    const SynthDraw& d = draws[i];
    ds.rows.push_back({id.str(), FlightMode::Solo, FormationClass::None, PositionClass::None,
                       d.separation_m, d.payload_g, d.wind, rows[i].solo_power_pct,
                       rows[i].solo_time_s});
    ds.rows.push_back({id.str(), FlightMode::Simultaneous, d.formation, d.position,
                       d.separation_m, d.payload_g, d.wind, rows[i].sim_power_pct,
                       rows[i].sim_time_s});
  }
  return ds;
}

}  // namespace skyway
