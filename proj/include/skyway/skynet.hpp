#pragma once

// Skyway network: rooftop nodes joined by undirected line-of-sight segments
// with 3D waypoints, plus shortest-path flight plan composition.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skyway/categories.hpp"

namespace skyway {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

// Euclidean distance between two drones (or any two points).
double separation_distance(const Vec3& a, const Vec3& b);

struct Node {
  std::string id;
  Vec3 position;
  int recharge_pads = 0;
  int waiting_pads = 0;
  int hover_capacity = 0;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Segment {
  std::string from;
  std::string to;
  std::vector<Vec3> waypoints;  // endpoints included
  WindCondition wind = WindCondition::None;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Polyline length; throws InputError for fewer than two waypoints.
double segment_length(std::span<const Vec3> waypoints);
inline double segment_length(const Segment& s) { return segment_length(s.waypoints); }

// One traversal of a segment. `reversed` flies it from `to` back to `from`.
struct Leg {
  std::size_t segment = 0;
  bool reversed = false;

  friend bool operator==(const Leg&, const Leg&) = default;
};

class SkywayNetwork {
 public:
  SkywayNetwork() = default;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool has_node(std::string_view id) const;
  std::size_t node_index(std::string_view id) const;  // throws InputError
  const Node& node(std::string_view id) const { return nodes_[node_index(id)]; }

  double length(std::size_t segment) const { return lengths_.at(segment); }
  // Segment indices incident to a node, ascending.
  const std::vector<std::size_t>& incident(std::size_t node) const { return adjacency_.at(node); }

  // Node indices at the start and end of a leg.
  std::size_t leg_start(const Leg& leg) const;
  std::size_t leg_end(const Leg& leg) const;

  // Point and unit direction at arc length `s` along a leg, clamped to [0, length].
  Vec3 point_along(const Leg& leg, double s) const;
  Vec3 direction_along(const Leg& leg, double s) const;

  friend bool operator==(const SkywayNetwork& a, const SkywayNetwork& b) {
    return a.nodes_ == b.nodes_ && a.segments_ == b.segments_;
  }

 private:
  friend SkywayNetwork build_network(std::vector<Node> nodes, std::vector<Segment> segments);

  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  std::vector<double> lengths_;
  std::vector<std::size_t> seg_from_;
  std::vector<std::size_t> seg_to_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Validates and indexes a network. Throws InputError on duplicate ids,
// dangling endpoints, self-loops or waypoints that miss their endpoint nodes.
SkywayNetwork build_network(std::vector<Node> nodes, std::vector<Segment> segments);

struct FlightPlan {
  std::string drone_id;
  std::string source;
  std::string destination;
  std::vector<Leg> legs;
  double payload_grams = 0.0;
  double depart_time = 0.0;
  // Offsets from the segment centreline while cruising, in the leg frame
  // (lateral is to the left of travel, vertical is up).
  double lateral_offset = 0.0;
  double vertical_offset = 0.0;
  double initial_battery_pct = 100.0;
};

// Minimum-length route; equal-length routes resolve to the lexicographically
// smallest node-id sequence. Throws InputError when unreachable.
FlightPlan compose_path(const SkywayNetwork& network, std::string_view source,
                        std::string_view destination);

// Sum of segment lengths over the plan's legs.
double plan_length(const SkywayNetwork& network, const FlightPlan& plan);
// Node ids visited by the plan, source first.
std::vector<std::string> plan_nodes(const SkywayNetwork& network, const FlightPlan& plan);
// Throws InputError unless the legs form a connected walk source -> destination.
void validate_plan(const SkywayNetwork& network, const FlightPlan& plan);

nlohmann::json network_to_json(const SkywayNetwork& network);
SkywayNetwork network_from_json(const nlohmann::json& doc);
SkywayNetwork load_network(const std::string& path);

}  // namespace skyway
