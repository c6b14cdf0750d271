#include "skyway/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "skyway/error.hpp"

namespace skyway {

std::string_view to_string(DronePhase phase) {
  switch (phase) {
    case DronePhase::Idle: return "idle";
    case DronePhase::Cruising: return "cruising";
    case DronePhase::Hovering: return "hovering";
    case DronePhase::OnWaitingPad: return "waiting";
    case DronePhase::Recharging: return "recharging";
    case DronePhase::Delivered: return "delivered";
    case DronePhase::Faulted: return "faulted";
  }
  return "?";
}

std::string_view to_string(Allocation allocation) {
  switch (allocation) {
    case Allocation::RechargePad: return "recharge";
    case Allocation::WaitingPad: return "waiting";
    case Allocation::HoverZone: return "hover";
  }
  return "?";
}

bool is_legal_transition(DronePhase from, DronePhase to) {
  using P = DronePhase;
  if (to == P::Faulted) return from != P::Delivered && from != P::Faulted;
  switch (from) {
    case P::Idle: return to == P::Cruising;
    case P::Cruising:
      return to == P::Hovering || to == P::OnWaitingPad || to == P::Recharging ||
             to == P::Delivered;
    // Hovering -> Recharging only happens at nodes without waiting pads.
    case P::Hovering: return to == P::OnWaitingPad || to == P::Recharging;
    case P::OnWaitingPad: return to == P::Recharging;
    case P::Recharging: return to == P::Cruising;
    case P::Delivered:
    case P::Faulted: return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// NodeOccupancy

NodeOccupancy::NodeOccupancy(int recharge_pads, int waiting_pads, int hover_capacity)
    : recharge_pads_(recharge_pads), waiting_pads_(waiting_pads), hover_capacity_(hover_capacity) {
  if (recharge_pads < 0 || waiting_pads < 0 || hover_capacity < 0) {
    throw InputError("pad counts must be non-negative");
  }
}

bool NodeOccupancy::present(const std::string& drone_id) const {
  if (std::find(recharging_.begin(), recharging_.end(), drone_id) != recharging_.end()) return true;
  return std::any_of(queue_.begin(), queue_.end(),
                     [&](const QueueEntry& e) { return e.drone_id == drone_id; });
}

std::size_t NodeOccupancy::pads_in_use() const {
  return static_cast<std::size_t>(
      std::count_if(queue_.begin(), queue_.end(), [](const QueueEntry& e) { return e.on_pad; }));
}

Allocation NodeOccupancy::allocate(const std::string& drone_id, double arrival_t) {
  if (present(drone_id)) throw InputError("drone '" + drone_id + "' is already at this node");
  if (queue_.empty() && recharging_.size() < static_cast<std::size_t>(recharge_pads_)) {
    recharging_.push_back(drone_id);
    return Allocation::RechargePad;
  }
  auto pos = std::upper_bound(queue_.begin(), queue_.end(), std::make_pair(arrival_t, drone_id),
                              [](const std::pair<double, std::string>& key, const QueueEntry& e) {
                                return std::tie(key.first, key.second) <
                                       std::tie(e.arrival_t, e.drone_id);
                              });
  if (pads_in_use() < static_cast<std::size_t>(waiting_pads_)) {
    queue_.insert(pos, QueueEntry{drone_id, arrival_t, true});
    return Allocation::WaitingPad;
  }
  const std::size_t hovering = queue_.size() - pads_in_use();
  if (hovering >= static_cast<std::size_t>(hover_capacity_)) {
    throw Error("hover capacity exceeded");
  }
  queue_.insert(pos, QueueEntry{drone_id, arrival_t, false});
  return Allocation::HoverZone;
}

void NodeOccupancy::finish_recharge(const std::string& drone_id) {
  auto it = std::find(recharging_.begin(), recharging_.end(), drone_id);
  if (it == recharging_.end()) throw InputError("drone '" + drone_id + "' holds no recharge pad");
  recharging_.erase(it);
}

void NodeOccupancy::remove(const std::string& drone_id) {
  std::erase_if(queue_, [&](const QueueEntry& e) { return e.drone_id == drone_id; });
  std::erase(recharging_, drone_id);
}

std::vector<NodeOccupancy::Transition> NodeOccupancy::promote() {
  std::vector<Transition> out;
  while (!queue_.empty() && recharging_.size() < static_cast<std::size_t>(recharge_pads_)) {
    QueueEntry head = queue_.front();
    queue_.erase(queue_.begin());
    recharging_.push_back(head.drone_id);
    out.push_back({head.drone_id, head.on_pad ? DronePhase::OnWaitingPad : DronePhase::Hovering,
                   DronePhase::Recharging});
  }
  for (QueueEntry& e : queue_) {
    if (pads_in_use() >= static_cast<std::size_t>(waiting_pads_)) break;
    if (!e.on_pad) {
      e.on_pad = true;
      out.push_back({e.drone_id, DronePhase::Hovering, DronePhase::OnWaitingPad});
    }
  }
  return out;
}

std::vector<std::string> NodeOccupancy::wait_slots() const {
  std::vector<std::string> ids;
  for (const auto& e : queue_) {
    if (e.on_pad) ids.push_back(e.drone_id);
  }
  return ids;
}

std::vector<std::string> NodeOccupancy::hover_set() const {
  std::vector<std::string> ids;
  for (const auto& e : queue_) {
    if (!e.on_pad) ids.push_back(e.drone_id);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// SimConfig

void SimConfig::validate() const {
  drone.validate();
  charge.validate();
  power.validate();
  thresholds.validate();
  model.validate();
  if (!(sample_dt > 0.0)) throw InputError("sample_dt must be positive");
  if (!(recharge_target > 0.0 && recharge_target < 1.0)) {
    throw InputError("recharge_target must lie in (0, 1)");
  }
  if (!(drain_noise >= 0.0)) throw InputError("drain_noise must be non-negative");
  if (fleet.empty()) throw InputError("fleet is empty");

  std::unordered_set<std::string> ids;
  for (const FlightPlan& plan : fleet) {
    if (plan.drone_id.empty()) throw InputError("plan with empty drone id");
    if (!ids.insert(plan.drone_id).second) {
      throw InputError("duplicate drone id '" + plan.drone_id + "'");
    }
    validate_plan(network, plan);
    classify_payload(plan.payload_grams, drone.max_payload_g);
    if (!(plan.depart_time >= 0.0)) throw InputError("depart time must be non-negative");
    if (!(plan.initial_battery_pct > 0.0 && plan.initial_battery_pct <= 100.0)) {
      throw InputError("initial battery must lie in (0, 100]");
    }
    const auto stops = plan_nodes(network, plan);
    for (std::size_t i = 1; i + 1 < stops.size(); ++i) {
      if (network.node(stops[i]).recharge_pads < 1) {
        throw InputError("node '" + stops[i] + "' is a recharging stop without recharge pads");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Event loop

namespace {

constexpr double kTimeEps = 1e-9;
constexpr std::size_t kNoVisit = std::numeric_limits<std::size_t>::max();

enum class EventKind { RechargeDone = 0, Arrive = 1, Depart = 2 };

Vec3 lateral_axis(const Vec3& dir) {
  Vec3 lat{-dir.y, dir.x, 0.0};
  const double n = lat.norm();
  return n > 1e-12 ? (1.0 / n) * lat : Vec3{0.0, 1.0, 0.0};
}

class Engine {
 public:
  explicit Engine(const SimConfig& config) : cfg_(config), rng_(config.seed) {
    cfg_.validate();
    for (const Node& n : cfg_.network.nodes()) {
      occupancy_.emplace_back(n.recharge_pads, n.waiting_pads, n.hover_capacity);
    }
    drones_.reserve(cfg_.fleet.size());
    for (std::size_t i = 0; i < cfg_.fleet.size(); ++i) {
      const FlightPlan& plan = cfg_.fleet[i];
      Drone d(plan);
      d.payload = classify_payload(plan.payload_grams, cfg_.drone.max_payload_g);
      d.multiplier = payload_multiplier(d.payload, cfg_.power);
      d.battery = plan.initial_battery_pct;
      d.node = cfg_.network.node_index(plan.source);
      d.record.drone_id = plan.drone_id;
      d.record.phases.push_back({0.0, DronePhase::Idle});
      by_id_[plan.drone_id] = i;
      drones_.push_back(std::move(d));
      push({plan.depart_time, EventKind::Depart, i});
    }
  }

  std::vector<FlightRecord> run() {
    const double dt = cfg_.sample_dt;
    double now = 0.0;
    std::uint64_t tick = 0;
    refresh_rates(now);
    while (!all_sampled()) {
      const double tick_t = static_cast<double>(tick) * dt;
      const double event_t = events_.empty() ? std::numeric_limits<double>::infinity()
                                             : events_.top().t;
      const bool on_tick = !(event_t < tick_t - kTimeEps);
      const double target = on_tick ? tick_t : event_t;

      advance(now, target);
      now = target;
      while (!events_.empty() && events_.top().t <= target + kTimeEps) {
        const Event e = events_.top();
        events_.pop();
        handle(e);
      }
      if (on_tick) {
        sample(now);
        ++tick;
        if (tick > kMaxTicks) throw Error("simulation exceeded its time horizon");
      }
      refresh_rates(now);
    }

    std::vector<FlightRecord> out;
    out.reserve(drones_.size());
    for (Drone& d : drones_) {
      finalize_summary(d);
      out.push_back(std::move(d.record));
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kMaxTicks = 200'000'000;

  struct Event {
    double t;
    EventKind kind;
    std::size_t drone;
  };

  struct Drone {
    explicit Drone(const FlightPlan& p) : plan(p) {}

    const FlightPlan& plan;
    PayloadClass payload = PayloadClass::None;
    double multiplier = 1.0;
    DronePhase phase = DronePhase::Idle;
    std::size_t leg = 0;
    double leg_start_t = 0.0;
    double leg_length = 0.0;
    double battery = 100.0;
    std::size_t node = 0;
    double ir = 1.0;
    double noise = 1.0;
    double seg_power = 0.0;
    double seg_ir_time = 0.0;
    std::size_t visit = kNoVisit;
    double recharge_level = 0.0;
    bool finished = false;
    bool sampled_final = false;
    double end_t = 0.0;
    FlightRecord record;
  };

  struct EventLater {
    const std::vector<Drone>* drones;
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      if (a.kind != b.kind) return a.kind > b.kind;
      return (*drones)[a.drone].plan.drone_id > (*drones)[b.drone].plan.drone_id;
    }
  };

  void push(Event e) { events_.push(e); }

  bool all_sampled() const {
    return std::all_of(drones_.begin(), drones_.end(),
                       [](const Drone& d) { return d.sampled_final; });
  }

  void set_phase(Drone& d, DronePhase next, double t) {
    if (!is_legal_transition(d.phase, next)) {
      throw std::logic_error("illegal phase transition " + std::string(to_string(d.phase)) +
                             " -> " + std::string(to_string(next)));
    }
    d.phase = next;
    d.record.phases.push_back({t, next});
  }

  const Leg& current_leg(const Drone& d) const { return d.plan.legs[d.leg]; }

  double distance_along(const Drone& d, double t) const {
    return std::clamp((t - d.leg_start_t) * cfg_.drone.speed_mps, 0.0, d.leg_length);
  }

  Vec3 position(const Drone& d, double t) const {
    if (d.phase != DronePhase::Cruising) return cfg_.network.nodes()[d.node].position;
    const Leg& leg = current_leg(d);
    const double s = distance_along(d, t);
    const Vec3 centre = cfg_.network.point_along(leg, s);
    const Vec3 dir = cfg_.network.direction_along(leg, s);
    return centre + d.plan.lateral_offset * lateral_axis(dir) +
           Vec3{0.0, 0.0, d.plan.vertical_offset};
  }

  // Interference ratio and drain noise for the interval starting at t.
  void refresh_rates(double t) {
    std::vector<std::size_t> cruising;
    std::vector<Vec3> where;
    for (std::size_t i = 0; i < drones_.size(); ++i) {
      if (drones_[i].phase == DronePhase::Cruising) {
        cruising.push_back(i);
        where.push_back(position(drones_[i], t));
      }
    }
    for (std::size_t a = 0; a < cruising.size(); ++a) {
      Drone& d = drones_[cruising[a]];
      d.ir = 1.0;
      double nearest = std::numeric_limits<double>::infinity();
      std::size_t peer = cruising.size();
      for (std::size_t b = 0; b < cruising.size(); ++b) {
        if (a == b) continue;
        if (drones_[cruising[b]].plan.legs[drones_[cruising[b]].leg].segment !=
            current_leg(d).segment) {
          continue;
        }
        const double sep = separation_distance(where[a], where[b]);
        if (sep < nearest) {
          nearest = sep;
          peer = b;
        }
      }
      if (peer != cruising.size()) {
        FormationThresholds th = cfg_.thresholds;
        th.travel_axis = cfg_.network.direction_along(current_leg(d), distance_along(d, t));
        const FormationClass formation = classify_formation(where[a], where[peer], th);
        const PositionClass pos = classify_position(formation, where[a], where[peer], th);
        const WindCondition wind = cfg_.network.segments()[current_leg(d).segment].wind;
        const FactorVector f =
            encode_factors(pos, nearest, formation, wind, d.payload, cfg_.model.codebook);
        d.ir = predict_ir(cfg_.model, f);
      }
    }
    if (cfg_.drain_noise > 0.0) {
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (Drone& d : drones_) {
        if (d.phase == DronePhase::Cruising || d.phase == DronePhase::Hovering) {
          d.noise = std::max(0.0, 1.0 + cfg_.drain_noise * gauss(rng_));
        }
      }
    }
  }

  void fault(Drone& d, double t, const std::string& why) {
    if (d.phase == DronePhase::Hovering || d.phase == DronePhase::OnWaitingPad) {
      occupancy_[d.node].remove(d.plan.drone_id);
    }
    set_phase(d, DronePhase::Faulted, t);
    d.finished = true;
    d.end_t = t;
    d.record.summary.faulted = true;
    d.record.summary.fault = why;
  }

  void advance(double t0, double t1) {
    const double span = t1 - t0;
    if (!(span > 0.0)) return;
    for (Drone& d : drones_) {
      switch (d.phase) {
        case DronePhase::Cruising: {
          const double rate = cfg_.power.cruise_drain_pct_per_s * d.multiplier * d.ir * d.noise;
          d.seg_ir_time += d.ir * span;
          if (rate * span >= d.battery && rate > 0.0) {
            const double t_empty = t0 + d.battery / rate;
            d.seg_power += d.battery;
            d.battery = 0.0;
            close_segment(d, t_empty);
            fault(d, t_empty,
                  "battery depleted on segment " + std::to_string(current_leg(d).segment));
          } else {
            d.seg_power += rate * span;
            d.battery -= rate * span;
          }
          break;
        }
        case DronePhase::Hovering: {
          const double rate = cfg_.power.hover_drain_pct_per_s * d.multiplier * d.noise;
          NodeVisit& visit = d.record.summary.nodes[d.visit];
          if (rate * span >= d.battery) {
            const double t_empty = t0 + d.battery / rate;
            visit.hover_power_pct += d.battery;
            visit.hover_s = t_empty - visit.arrival_t;
            d.battery = 0.0;
            fault(d, t_empty,
                  "battery depleted while hovering at " + cfg_.network.nodes()[d.node].id);
          } else {
            visit.hover_power_pct += rate * span;
            d.battery -= rate * span;
          }
          break;
        }
        case DronePhase::Recharging: {
          const NodeVisit& visit = d.record.summary.nodes[d.visit];
          d.battery =
              100.0 * charge_level_after(d.recharge_level, t1 - visit.recharge_start_t, cfg_.charge);
          break;
        }
        default:
          break;
      }
    }
  }

  void start_leg(Drone& d, std::size_t drone_index, double t) {
    set_phase(d, DronePhase::Cruising, t);
    d.leg_start_t = t;
    d.leg_length = cfg_.network.length(current_leg(d).segment);
    d.seg_power = 0.0;
    d.seg_ir_time = 0.0;
    push({t + d.leg_length / cfg_.drone.speed_mps, EventKind::Arrive, drone_index});
  }

  void close_segment(Drone& d, double t) {
    SegmentStat stat;
    stat.segment = current_leg(d).segment;
    stat.start_t = d.leg_start_t;
    stat.end_t = t;
    stat.power_pct = d.seg_power;
    stat.expected_power_pct = d.leg_length / cfg_.drone.speed_mps *
                              cfg_.power.cruise_drain_pct_per_s * d.multiplier;
    const double span = t - d.leg_start_t;
    stat.mean_ir = span > 0.0 ? d.seg_ir_time / span : 1.0;
    d.record.summary.segments.push_back(stat);
  }

  void begin_recharge(Drone& d, std::size_t drone_index, double t) {
    set_phase(d, DronePhase::Recharging, t);
    NodeVisit& visit = d.record.summary.nodes[d.visit];
    visit.recharge_start_t = t;
    visit.recharge_start_battery_pct = d.battery;
    d.recharge_level = std::min(d.battery / 100.0, cfg_.recharge_target);
    const double duration = charge_time(d.recharge_level, cfg_.recharge_target, cfg_.charge);
    visit.recharge_end_t = t + duration;
    push({t + duration, EventKind::RechargeDone, drone_index});
  }

  void handle(const Event& e) {
    Drone& d = drones_[e.drone];
    if (d.finished) return;
    switch (e.kind) {
      case EventKind::Depart:
        start_leg(d, e.drone, e.t);
        break;
      case EventKind::Arrive: {
        d.battery = std::max(d.battery, 0.0);
        close_segment(d, e.t);
        d.node = cfg_.network.leg_end(current_leg(d));
        if (d.leg + 1 == d.plan.legs.size()) {
          set_phase(d, DronePhase::Delivered, e.t);
          d.finished = true;
          d.end_t = e.t;
          break;
        }
        NodeVisit visit;
        visit.node = cfg_.network.nodes()[d.node].id;
        visit.arrival_t = e.t;
        visit.arrival_battery_pct = d.battery;
        d.record.summary.nodes.push_back(visit);
        d.visit = d.record.summary.nodes.size() - 1;
        Allocation where;
        try {
          where = occupancy_[d.node].allocate(d.plan.drone_id, e.t);
        } catch (const Error&) {
          fault(d, e.t, "hover capacity exceeded at " + visit.node);
          break;
        }
        d.record.summary.nodes[d.visit].allocation = where;
        if (where == Allocation::RechargePad) {
          begin_recharge(d, e.drone, e.t);
        } else {
          set_phase(d, where == Allocation::WaitingPad ? DronePhase::OnWaitingPad
                                                       : DronePhase::Hovering,
                    e.t);
        }
        break;
      }
      case EventKind::RechargeDone: {
        NodeVisit& visit = d.record.summary.nodes[d.visit];
        visit.completed = true;
        d.battery = 100.0 * cfg_.recharge_target;
        const std::size_t node = d.node;
        occupancy_[node].finish_recharge(d.plan.drone_id);
        d.visit = kNoVisit;
        ++d.leg;
        start_leg(d, e.drone, e.t);
        for (const auto& tr : occupancy_[node].promote()) {
          const std::size_t idx = by_id_.at(tr.drone_id);
          Drone& other = drones_[idx];
          NodeVisit& ov = other.record.summary.nodes[other.visit];
          if (tr.from == DronePhase::Hovering) ov.hover_s = e.t - ov.arrival_t;
          if (tr.to == DronePhase::OnWaitingPad) {
            ov.waitpad_t = e.t;
            set_phase(other, DronePhase::OnWaitingPad, e.t);
          } else {
            begin_recharge(other, idx, e.t);
          }
        }
        break;
      }
    }
  }

  void sample(double t) {
    for (Drone& d : drones_) {
      if (d.sampled_final) continue;
      TraceRow row;
      row.t = t;
      row.position = position(d, t);
      row.battery_pct = std::clamp(d.battery, 0.0, 100.0);
      row.phase = d.phase;
      row.ir = d.phase == DronePhase::Cruising ? d.ir : 1.0;
      d.record.rows.push_back(row);
      if (d.finished) d.sampled_final = true;
    }
  }

  void finalize_summary(Drone& d) {
    FlightSummary& s = d.record.summary;
    std::vector<double> seg_powers;
    std::vector<double> hover_powers;
    for (const auto& seg : s.segments) seg_powers.push_back(seg.power_pct);
    double wait = 0.0;
    for (auto& v : s.nodes) {
      hover_powers.push_back(v.hover_power_pct);
      if (v.allocation == Allocation::HoverZone && !v.waitpad_t && v.recharge_start_t == 0.0 &&
          !v.completed && s.faulted) {
        wait += d.end_t - v.arrival_t;
      } else {
        wait += std::max(0.0, (v.recharge_start_t > 0.0 || v.completed ? v.recharge_start_t
                                                                         : d.end_t) -
                                  v.arrival_t);
      }
    }
    s.total_power_pct = total_power(seg_powers, hover_powers);
    s.delivery_time_s = d.end_t - d.plan.depart_time;
    s.total_wait_s = wait;
  }

  SimConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Drone> drones_;
  std::vector<NodeOccupancy> occupancy_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_{EventLater{&drones_}};
};

}  // namespace

std::vector<FlightRecord> run(const SimConfig& config) { return Engine(config).run(); }

double measure_ir(const FlightRecord& solo, const FlightRecord& multi) {
  if (solo.drone_id != multi.drone_id) throw InputError("records belong to different drones");
  if (solo.summary.faulted || multi.summary.faulted) {
    throw InputError("interference ratio needs completed flights");
  }
  if (!(solo.summary.total_power_pct > 0.0)) throw Error("solo power is zero");
  return multi.summary.total_power_pct / solo.summary.total_power_pct;
}

// ---------------------------------------------------------------------------
// Analytic prediction

Prediction predict_plan(const SimConfig& config, const FlightPlan& plan, const PeerSchedule& peers) {
  validate_plan(config.network, plan);
  config.model.validate();
  const PayloadClass payload = classify_payload(plan.payload_grams, config.drone.max_payload_g);
  const double mult = payload_multiplier(payload, config.power);
  const auto stops = plan_nodes(config.network, plan);

  Prediction out;
  std::vector<double> seg_times;
  std::vector<double> node_times;
  std::vector<double> solo_powers;
  std::vector<double> powers;
  std::vector<double> hover_powers;
  std::vector<double> waits;
  std::vector<double> penalties;

  double battery = plan.initial_battery_pct;
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    const Leg& leg = plan.legs[i];
    const double t = segment_traverse_time(config.network.length(leg.segment),
                                           config.drone.speed_mps);
    const double expected = t * config.power.cruise_drain_pct_per_s * mult;
    seg_times.push_back(t);
    solo_powers.push_back(expected);
    battery -= expected;
    if (battery < 0.0) {
      throw Error("plan for '" + plan.drone_id + "' exhausts the battery on leg " +
                  std::to_string(i));
    }

    double ratio = 1.0;
    if (auto it = peers.legs.find(i); it != peers.legs.end()) {
      const SegmentPeer& peer = it->second;
      if (!(peer.shared_fraction >= 0.0 && peer.shared_fraction <= 1.0)) {
        throw InputError("shared_fraction must lie in [0, 1]");
      }
      const WindCondition wind = config.network.segments()[leg.segment].wind;
      const FactorVector f = encode_factors(peer.position, peer.separation_m, peer.formation, wind,
                                            payload, config.model.codebook);
      ratio = 1.0 + peer.shared_fraction * (predict_ir(config.model, f) - 1.0);
    }
    out.leg_ir.push_back(ratio);
    const double with_peers = interference_power(expected, ratio);
    powers.push_back(with_peers);

    const bool last = i + 1 == plan.legs.size();
    if (last) break;
    // The excess charge only costs time if it has to be put back at the next stop.
    penalties.push_back(excess_power_time(with_peers - expected, config.power.recharge_pct_per_s));
    node_times.push_back(
        charge_time(std::min(battery / 100.0, config.recharge_target), config.recharge_target,
                    config.charge));

    const std::string& node = stops[i + 1];
    if (auto it = peers.nodes.find(node); it != peers.nodes.end()) {
      NodePrediction np;
      np.node = node;
      np.hover_s = hover_delay(it->second);
      np.waitpad_s = waitpad_delay(it->second);
      const double hover_rate = config.power.hover_drain_pct_per_s * mult;
      np.hover_penalty_s =
          hover_recharge_penalty(hover_rate, np.hover_s, config.power.recharge_pct_per_s);
      np.hover_power_pct = hover_rate * np.hover_s;
      np.wait_s = node_wait(np.hover_s, np.waitpad_s, np.hover_penalty_s);
      hover_powers.push_back(np.hover_power_pct);
      waits.push_back(np.wait_s);
      out.nodes.push_back(np);
    }
    battery = 100.0 * config.recharge_target;
  }

  out.solo_power_pct = total_power(solo_powers, {});
  out.solo_delivery_time_s = delivery_duration(seg_times, node_times);
  double interfered = 0.0;
  for (double p : powers) interfered += p;
  out.power_pct = interfered + total_power({}, hover_powers);
  out.delivery_time_s =
      delivery_time_with_interference(out.solo_delivery_time_s, waits, penalties);
  return out;
}

// ---------------------------------------------------------------------------
// Reading delay-model inputs back out of a run

ObservedNodeDelay observe_node_delay(const SimConfig& config,
                                     const std::vector<FlightRecord>& records,
                                     std::string_view drone_id, std::string_view node_id) {
  struct Stay {
    std::string id;
    const NodeVisit* visit;
    double duration() const { return visit->recharge_end_t - visit->recharge_start_t; }
  };
  std::vector<Stay> stays;
  const NodeVisit* mine = nullptr;
  double mult = 1.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const NodeVisit& v : records[i].summary.nodes) {
      if (v.node != node_id) continue;
      stays.push_back({records[i].drone_id, &v});
      if (records[i].drone_id == drone_id && mine == nullptr) {
        mine = &v;
        for (const FlightPlan& p : config.fleet) {
          if (p.drone_id == drone_id) {
            mult = payload_multiplier(classify_payload(p.payload_grams, config.drone.max_payload_g),
                                      config.power);
          }
        }
      }
    }
  }
  if (mine == nullptr) throw InputError("drone did not stop at that node");

  auto ahead = [&](const Stay& s) {
    return std::tie(s.visit->arrival_t, s.id) < std::tie(mine->arrival_t, drone_id);
  };
  std::vector<Stay> before;
  for (const Stay& s : stays) {
    if (ahead(s)) before.push_back(s);
  }
  std::sort(before.begin(), before.end(), [](const Stay& a, const Stay& b) {
    return std::tie(a.visit->arrival_t, a.id) < std::tie(b.visit->arrival_t, b.id);
  });

  // Pads freed at exactly time t are already vacated (completions run before arrivals).
  auto on_pad_at = [](const Stay& s, double t) {
    return s.visit->recharge_start_t <= t + kTimeEps && s.visit->recharge_end_t > t + kTimeEps;
  };
  auto queued_at = [](const Stay& s, double t) { return s.visit->recharge_start_t > t + kTimeEps; };

  ObservedNodeDelay out;
  const double arrival = mine->arrival_t;
  out.measured_wait_s = mine->recharge_start_t - arrival;
  out.measured_hover_s = mine->hover_s;
  out.hover_drain_pct_per_s = config.power.hover_drain_pct_per_s * mult;
  const double level = std::min(mine->arrival_battery_pct / 100.0, config.recharge_target);
  out.measured_extra_recharge_s =
      (mine->recharge_end_t - mine->recharge_start_t) -
      charge_time(level, config.recharge_target, config.charge);

  if (mine->allocation == Allocation::RechargePad) return out;

  const int waiting_pads = config.network.node(node_id).waiting_pads;
  std::vector<double> queued;
  for (const Stay& s : before) {
    if (on_pad_at(s, arrival)) {
      out.at_arrival.pad_times.push_back(arrival - s.visit->recharge_start_t);
      out.at_arrival.waiting_times.push_back(s.duration());
    } else if (queued_at(s, arrival)) {
      queued.push_back(s.duration());
    }
  }
  if (mine->allocation == Allocation::HoverZone) {
    const std::size_t hovering_ahead =
        queued.size() > static_cast<std::size_t>(waiting_pads)
            ? queued.size() - static_cast<std::size_t>(waiting_pads)
            : 0;
    for (std::size_t k = 0; k < hovering_ahead; ++k) {
      out.at_arrival.waiting_times.push_back(queued[k]);
    }
  } else {
    out.at_arrival.waiting_times.clear();
  }

  const double landing = mine->waitpad_t.value_or(
      mine->allocation == Allocation::HoverZone ? mine->recharge_start_t : arrival);
  for (const Stay& s : before) {
    if (on_pad_at(s, landing)) {
      out.at_landing.pad_times.push_back(landing - s.visit->recharge_start_t);
      out.at_landing.recharge_times.push_back(s.duration());
    } else if (queued_at(s, landing)) {
      out.at_landing.recharge_times.push_back(s.duration());
    }
  }
  return out;
}

}  // namespace skyway
