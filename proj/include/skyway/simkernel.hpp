#pragma once

// Deterministic multi-drone delivery simulator.
//
// Phase changes (departure, arrival, recharge completion) are exact-time
// events; battery drain, interference classification and trace sampling run
// on a fixed sample_dt grid between them. Nodes allocate recharge pads, then
// waiting pads, then the hover zone, first come first served.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skyway/energy.hpp"
#include "skyway/interference.hpp"
#include "skyway/skynet.hpp"

namespace skyway {

enum class DronePhase { Idle, Cruising, Hovering, OnWaitingPad, Recharging, Delivered, Faulted };

std::string_view to_string(DronePhase phase);
bool is_legal_transition(DronePhase from, DronePhase to);

enum class Allocation { RechargePad, WaitingPad, HoverZone };
std::string_view to_string(Allocation allocation);

// Pad bookkeeping for one node. Drones not yet recharging wait in a single
// FCFS queue ordered by (arrival time, drone id); the first `waiting_pads`
// of them sit on waiting pads and the rest hover.
class NodeOccupancy {
 public:
  struct Transition {
    std::string drone_id;
    DronePhase from;
    DronePhase to;
  };
  struct QueueEntry {
    std::string drone_id;
    double arrival_t;
    bool on_pad;
  };

  NodeOccupancy(int recharge_pads, int waiting_pads, int hover_capacity);

  // Throws Error when the hover zone is full (the drone faults) and
  // InputError if the drone is already at this node.
  Allocation allocate(const std::string& drone_id, double arrival_t);
  // Frees the recharge pad held by `drone_id`.
  void finish_recharge(const std::string& drone_id);
  // Removes a queued drone (used when a hovering drone faults).
  void remove(const std::string& drone_id);
  // Fills free recharge pads from the queue head, then free waiting pads
  // from the hover zone. Transitions come back in the order applied.
  std::vector<Transition> promote();

  const std::vector<std::string>& recharge_slots() const { return recharging_; }
  std::vector<std::string> wait_slots() const;
  std::vector<std::string> hover_set() const;
  const std::vector<QueueEntry>& fcfs_queue() const { return queue_; }

  int recharge_pads() const { return recharge_pads_; }
  int waiting_pads() const { return waiting_pads_; }
  int hover_capacity() const { return hover_capacity_; }

 private:
  bool present(const std::string& drone_id) const;
  std::size_t pads_in_use() const;

  int recharge_pads_;
  int waiting_pads_;
  int hover_capacity_;
  std::vector<std::string> recharging_;
  std::vector<QueueEntry> queue_;
};

struct SimConfig {
  SkywayNetwork network;
  std::vector<FlightPlan> fleet;
  DroneSpec drone;
  ChargeParams charge;
  PowerModel power;
  SegmentInterferenceModel model;
  FormationThresholds thresholds;
  double sample_dt = 0.1;
  double recharge_target = 0.99;
  std::uint64_t seed = 0;
  // Relative std-dev of multiplicative drain noise per interval; 0 disables it.
  double drain_noise = 0.0;

  // Throws InputError on any inconsistency (bad plan, missing pads, ...).
  void validate() const;
};

struct TraceRow {
  double t = 0.0;
  Vec3 position;
  double battery_pct = 0.0;
  DronePhase phase = DronePhase::Idle;
  double ir = 1.0;
};

struct PhaseChange {
  double t = 0.0;
  DronePhase phase = DronePhase::Idle;
};

struct NodeVisit {
  std::string node;
  double arrival_t = 0.0;
  Allocation allocation = Allocation::RechargePad;
  double arrival_battery_pct = 0.0;
  std::optional<double> waitpad_t;  // set when a hovering drone reached a waiting pad
  double recharge_start_t = 0.0;
  double recharge_end_t = 0.0;
  double recharge_start_battery_pct = 0.0;
  double hover_s = 0.0;
  double hover_power_pct = 0.0;
  bool completed = false;
};

struct SegmentStat {
  std::size_t segment = 0;
  double start_t = 0.0;
  double end_t = 0.0;
  double power_pct = 0.0;
  double expected_power_pct = 0.0;
  double mean_ir = 1.0;
};

struct FlightSummary {
  double total_power_pct = 0.0;
  double delivery_time_s = 0.0;
  double total_wait_s = 0.0;
  std::vector<NodeVisit> nodes;
  std::vector<SegmentStat> segments;
  bool faulted = false;
  std::string fault;
};

struct FlightRecord {
  std::string drone_id;
  std::vector<TraceRow> rows;
  std::vector<PhaseChange> phases;
  FlightSummary summary;
};

// Runs every plan in the fleet to delivery or fault. Records come back in
// fleet order. Deterministic for a given config.
std::vector<FlightRecord> run(const SimConfig& config);

// Power ratio of a simultaneous run to the paired solo run.
double measure_ir(const FlightRecord& solo, const FlightRecord& multi);

// Conditions a plan is expected to meet, for analytic prediction.
struct SegmentPeer {
  PositionClass position = PositionClass::None;
  FormationClass formation = FormationClass::None;
  double separation_m = 1.5;
  double shared_fraction = 1.0;  // fraction of the leg flown alongside the peer
};

struct PeerSchedule {
  std::map<std::size_t, SegmentPeer> legs;          // keyed by leg index
  std::map<std::string, NodeDelayInputs> nodes;     // keyed by node id
};

struct NodePrediction {
  std::string node;
  double hover_s = 0.0;
  double waitpad_s = 0.0;
  double hover_penalty_s = 0.0;
  double hover_power_pct = 0.0;
  double wait_s = 0.0;
};

struct Prediction {
  double power_pct = 0.0;
  double delivery_time_s = 0.0;
  double solo_power_pct = 0.0;
  double solo_delivery_time_s = 0.0;
  std::vector<double> leg_ir;
  std::vector<NodePrediction> nodes;
};

// Closed-form prediction without the event loop: interference-scaled leg
// power, node waits from the delay model, delivery time composed on top of
// the solo baseline.
Prediction predict_plan(const SimConfig& config, const FlightPlan& plan, const PeerSchedule& peers);

// Delay-model inputs read back from a finished run for one drone's stop.
//  at_arrival: pad_times = charge time already banked by each pad occupant,
//              waiting_times = full recharge times of the drones that must
//              clear the recharge pad before a waiting pad opens up.
//  at_landing: the same pad_times taken when the drone reaches a waiting
//              pad, recharge_times = full recharge times of every drone
//              still ahead of it on the pads.
struct ObservedNodeDelay {
  NodeDelayInputs at_arrival;
  NodeDelayInputs at_landing;
  double measured_wait_s = 0.0;       // arrival -> recharge start
  double measured_hover_s = 0.0;
  double measured_extra_recharge_s = 0.0;  // recharge time beyond the no-hover charge
  double hover_drain_pct_per_s = 0.0;
};

ObservedNodeDelay observe_node_delay(const SimConfig& config,
                                     const std::vector<FlightRecord>& records,
                                     std::string_view drone_id, std::string_view node_id);

}  // namespace skyway
