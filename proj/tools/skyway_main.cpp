// skyway: simulate fleets, fit and validate interference models, predict plans.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "skyway/config.hpp"
#include "skyway/error.hpp"
#include "skyway/fitlab.hpp"
#include "skyway/simkernel.hpp"

namespace fs = std::filesystem;
using namespace skyway;

namespace {

struct Globals {
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string config;
};

std::ofstream open_output(const Globals& g, const std::string& name) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw InputError("cannot create output directory '" + g.out + "'");
  const fs::path path = fs::path(g.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  return f;
}

SimConfig base_config(const Globals& g, const std::string& network, const std::string& model) {
  SimConfig cfg;
  cfg.network = load_network(network);
  if (!model.empty()) cfg.model = load_model(model);
  if (!g.config.empty()) load_config_file(g.config, cfg);
  cfg.seed = g.seed;
  return cfg;
}

double recharge_rate(const Globals& g) {
  SimConfig cfg;
  if (!g.config.empty()) load_config_file(g.config, cfg);
  return cfg.power.recharge_pct_per_s;
}

std::string two_dp(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

int cmd_simulate(const Globals& g, const std::string& network, const std::string& fleet,
                 const std::string& model, bool with_solo) {
  SimConfig cfg = base_config(g, network, model);
  cfg.fleet = load_fleet(fleet, cfg.network);
  const auto records = run(cfg);

  for (const auto& r : records) {
    auto f = open_output(g, "trace_" + r.drone_id + ".csv");
    write_trace_csv(f, r);
  }
  {
    auto f = open_output(g, "summary.csv");
    write_summary_csv(f, records);
  }
  if (with_solo) {
    auto f = open_output(g, "ir.csv");
    f << "drone_id,solo_power_pct,multi_power_pct,ir\n";
    for (std::size_t i = 0; i < cfg.fleet.size(); ++i) {
      SimConfig solo = cfg;
      solo.fleet = {cfg.fleet[i]};
      const auto alone = run(solo).front();
      const auto& multi = records[i];
      if (alone.summary.faulted || multi.summary.faulted) continue;
      char line[160];
      std::snprintf(line, sizeof line, "%s,%.4f,%.4f,%.6f\n", multi.drone_id.c_str(),
                    alone.summary.total_power_pct, multi.summary.total_power_pct,
                    measure_ir(alone, multi));
      f << line;
    }
  }

  int status = 0;
  for (const auto& r : records) {
    if (r.summary.faulted) {
      std::cerr << "error: drone " << r.drone_id << " faulted: " << r.summary.fault << '\n';
      status = 1;
    }
  }
  std::cout << "simulated " << records.size() << " drones -> " << g.out << '\n';
  return status;
}

int cmd_fit(const Globals& g, const std::string& dataset, const std::string& model_out, int k) {
  const auto rows = extract_ir(load_dataset(dataset));
  SelectOptions opt;
  opt.k = k;
  opt.seed = g.seed;
  const auto report = select_degrees(rows, opt);
  auto f = open_output(g, model_out);
  f << fit_report_to_json(report).dump(2) << '\n';
  std::cout << "degrees:";
  for (Variable v : kAllVariables) {
    std::cout << ' ' << to_string(v) << '=' << report.degrees[index_of(v)];
  }
  std::cout << "\nmodel -> " << (fs::path(g.out) / model_out).string() << '\n';
  return 0;
}

int cmd_predict(const Globals& g, const std::string& network, const std::string& fleet,
                const std::string& drone, const std::string& peers, const std::string& model) {
  if (model.empty()) throw InputError("model file not found");
  SimConfig cfg = base_config(g, network, model);
  cfg.fleet = load_fleet(fleet, cfg.network);
  if (cfg.fleet.empty()) throw InputError("fleet is empty");
  const FlightPlan* plan = &cfg.fleet.front();
  if (!drone.empty()) {
    plan = nullptr;
    for (const auto& p : cfg.fleet) {
      if (p.drone_id == drone) plan = &p;
    }
    if (plan == nullptr) throw InputError("drone '" + drone + "' is not in the fleet");
  }
  const PeerSchedule schedule = peers.empty() ? PeerSchedule{} : load_peers(peers);
  const auto pred = predict_plan(cfg, *plan, schedule);

  std::cout << "drone " << plan->drone_id << '\n'
            << "power_pct " << two_dp(pred.power_pct) << '\n'
            << "delivery_time_s " << two_dp(pred.delivery_time_s) << '\n';
  auto f = open_output(g, "prediction.csv");
  f << "drone_id,power_pct,delivery_time_s,solo_power_pct,solo_delivery_time_s\n"
    << plan->drone_id << ',' << two_dp(pred.power_pct) << ',' << two_dp(pred.delivery_time_s)
    << ',' << two_dp(pred.solo_power_pct) << ',' << two_dp(pred.solo_delivery_time_s) << '\n';
  return 0;
}

int cmd_validate(const Globals& g, const std::string& dataset, const std::string& model) {
  const auto m = load_model(model);
  const auto rows = extract_ir(load_dataset(dataset), m.codebook);
  const auto report = validate_model(m, rows, recharge_rate(g));
  auto f = open_output(g, "validation.csv");
  write_validation_csv(f, report);
  write_validation_csv(std::cout, report);
  return 0;
}

int cmd_ablate(const Globals& g, const std::string& dataset, int k) {
  const auto rows = extract_ir(load_dataset(dataset));
  SelectOptions opt;
  opt.k = k;
  opt.seed = g.seed;
  const auto report = ablate(rows, opt, recharge_rate(g));
  auto f = open_output(g, "ablation.csv");
  write_ablation_csv(f, report);
  write_ablation_csv(std::cout, report);
  return 0;
}

int cmd_ir(const Globals& g, const std::string& dataset) {
  const auto rows = extract_ir(load_dataset(dataset));
  auto f = open_output(g, "ir_dataset.csv");
  f << "position,separation,formation,wind,payload,ir,solo_power_pct,sim_power_pct,solo_time_s,"
       "sim_time_s\n";
  char line[320];
  for (const auto& r : rows) {
    const auto& c = r.factors.codes;
    std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6g,%.6g,%.9g,%.9g,%.9g,%.9g,%.9g\n", c[0],
                  c[1], c[2], c[3], c[4], r.ir, r.solo_power_pct, r.sim_power_pct, r.solo_time_s,
                  r.sim_time_s);
    f << line;
  }
  std::cout << rows.size() << " pairs -> " << (fs::path(g.out) / "ir_dataset.csv").string()
            << '\n';
  return 0;
}

int cmd_synth(const Globals& g, std::size_t pairs, double noise) {
  SynthOptions opt;
  opt.pairs = pairs;
  opt.seed = g.seed;
  opt.noise_sigma = noise;
  opt.recharge_pct_per_s = recharge_rate(g);
  auto f = open_output(g, "dataset.csv");
  write_dataset(f, synthesize_dataset(opt));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skyway drone-delivery interference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for shuffling, noise and synthesis");
  app.add_option("--config", g.config, "Drone/simulation config JSON");

  std::string network, fleet, model, dataset, peers, drone, model_out = "model.json";
  int k = 5;
  bool with_solo = false;
  std::size_t pairs = 1485;
  double noise = 0.0;

  auto* sim = app.add_subcommand("simulate", "Run a fleet through the event simulator");
  sim->add_option("--network", network)->required();
  sim->add_option("--fleet", fleet)->required();
  sim->add_option("--model", model, "Interference model JSON (defaults built in)");
  sim->add_flag("--solo", with_solo, "Also fly each drone alone and write ir.csv");

  auto* fit = app.add_subcommand("fit", "Select degrees and fit the interference model");
  fit->add_option("--dataset", dataset)->required();
  fit->add_option("--model-out", model_out, "File name inside --out");
  fit->add_option("-k,--folds", k, "Cross-validation folds");

  auto* pred = app.add_subcommand("predict", "Analytic power and delivery-time prediction");
  pred->add_option("--network", network)->required();
  pred->add_option("--fleet", fleet, "Fleet JSON holding the plan")->required();
  pred->add_option("--drone", drone, "Drone id in the fleet (default: first)");
  pred->add_option("--peers", peers, "Peer schedule JSON");
  pred->add_option("--model", model);

  auto* val = app.add_subcommand("validate", "Score a model on a dataset");
  val->add_option("--dataset", dataset)->required();
  val->add_option("--model", model)->required();

  auto* abl = app.add_subcommand("ablate", "Leave-one-variable-out ablation");
  abl->add_option("--dataset", dataset)->required();
  abl->add_option("-k,--folds", k, "Cross-validation folds");

  auto* ir = app.add_subcommand("ir", "Pair solo and simultaneous flights into IR rows");
  ir->add_option("--dataset", dataset)->required();

  auto* syn = app.add_subcommand("synth", "Write a synthetic flight dataset");
  syn->add_option("--pairs", pairs, "Solo/simultaneous pairs");
  syn->add_option("--noise", noise, "Gaussian noise on the ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(g, network, fleet, model, with_solo);
    if (*fit) return cmd_fit(g, dataset, model_out, k);
    if (*pred) return cmd_predict(g, network, fleet, drone, peers, model);
    if (*val) return cmd_validate(g, dataset, model);
    if (*abl) return cmd_ablate(g, dataset, k);
    if (*ir) return cmd_ir(g, dataset);
    if (*syn) return cmd_synth(g, pairs, noise);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
