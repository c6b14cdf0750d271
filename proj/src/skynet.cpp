#include "skyway/skynet.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "skyway/error.hpp"

namespace skyway {
namespace {

constexpr double kEndpointTolerance = 1e-9;

bool nearly_equal_length(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double separation_distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double segment_length(std::span<const Vec3> waypoints) {
  if (waypoints.size() < 2) {
    throw InputError("segment needs at least 2 waypoints");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += separation_distance(waypoints[i - 1], waypoints[i]);
  }
  return total;
}

bool SkywayNetwork::has_node(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::size_t SkywayNetwork::node_index(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw InputError("unknown node '" + std::string(id) + "'");
  }
  return it->second;
}

std::size_t SkywayNetwork::leg_start(const Leg& leg) const {
  return leg.reversed ? seg_to_.at(leg.segment) : seg_from_.at(leg.segment);
}

std::size_t SkywayNetwork::leg_end(const Leg& leg) const {
  return leg.reversed ? seg_from_.at(leg.segment) : seg_to_.at(leg.segment);
}

Vec3 SkywayNetwork::point_along(const Leg& leg, double s) const {
  const auto& wp = segments_.at(leg.segment).waypoints;
  const double total = lengths_[leg.segment];
  double remaining = std::clamp(s, 0.0, total);
  if (leg.reversed) remaining = total - remaining;
  // Walk forward along the stored waypoint order.
  for (std::size_t i = 1; i < wp.size(); ++i) {
    const double piece = separation_distance(wp[i - 1], wp[i]);
    if (remaining <= piece || i + 1 == wp.size()) {
      if (piece <= 0.0) return wp[i];
      const double f = std::min(remaining / piece, 1.0);
      return wp[i - 1] + f * (wp[i] - wp[i - 1]);
    }
    remaining -= piece;
  }
  return wp.back();
}

Vec3 SkywayNetwork::direction_along(const Leg& leg, double s) const {
  const auto& wp = segments_.at(leg.segment).waypoints;
  const double total = lengths_[leg.segment];
  double remaining = std::clamp(s, 0.0, total);
  if (leg.reversed) remaining = total - remaining;
  Vec3 dir{1.0, 0.0, 0.0};
  for (std::size_t i = 1; i < wp.size(); ++i) {
    const double piece = separation_distance(wp[i - 1], wp[i]);
    if (piece > 0.0) dir = (1.0 / piece) * (wp[i] - wp[i - 1]);
    if (remaining < piece) break;
    remaining -= piece;
  }
  return leg.reversed ? -1.0 * dir : dir;
}

SkywayNetwork build_network(std::vector<Node> nodes, std::vector<Segment> segments) {
  if (nodes.empty()) throw InputError("network has no nodes");
  if (segments.empty()) throw InputError("network has no segments");

  SkywayNetwork net;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.id.empty()) throw InputError("node with empty id");
    if (!n.position.finite()) throw InputError("node '" + n.id + "' has a non-finite position");
    if (n.recharge_pads < 0 || n.waiting_pads < 0 || n.hover_capacity < 0) {
      throw InputError("node '" + n.id + "' has a negative pad count");
    }
    if (!net.index_.emplace(n.id, i).second) {
      throw InputError("duplicate node id '" + n.id + "'");
    }
  }

  net.adjacency_.assign(nodes.size(), {});
  for (std::size_t s = 0; s < segments.size(); ++s) {
    Segment& seg = segments[s];
    auto from = net.index_.find(seg.from);
    auto to = net.index_.find(seg.to);
    if (from == net.index_.end() || to == net.index_.end()) {
      const std::string& missing = from == net.index_.end() ? seg.from : seg.to;
      throw InputError("dangling endpoint '" + missing + "' in segment " + std::to_string(s));
    }
    if (from->second == to->second) {
      throw InputError("self-loop segment at '" + seg.from + "'");
    }
    if (seg.waypoints.empty()) {
      seg.waypoints = {nodes[from->second].position, nodes[to->second].position};
    }
    for (const Vec3& p : seg.waypoints) {
      if (!p.finite()) throw InputError("non-finite waypoint in segment " + std::to_string(s));
    }
    const double length = segment_length(seg.waypoints);
    if (!(length > 0.0)) throw InputError("zero-length segment " + std::to_string(s));
    if (separation_distance(seg.waypoints.front(), nodes[from->second].position) >
            kEndpointTolerance ||
        separation_distance(seg.waypoints.back(), nodes[to->second].position) >
            kEndpointTolerance) {
      throw InputError("segment " + std::to_string(s) + " waypoints do not meet its endpoints");
    }
    net.lengths_.push_back(length);
    net.seg_from_.push_back(from->second);
    net.seg_to_.push_back(to->second);
    net.adjacency_[from->second].push_back(s);
    net.adjacency_[to->second].push_back(s);
  }
  net.nodes_ = std::move(nodes);
  net.segments_ = std::move(segments);
  return net;
}

FlightPlan compose_path(const SkywayNetwork& network, std::string_view source,
                        std::string_view destination) {
  const std::size_t src = network.node_index(source);
  const std::size_t dst = network.node_index(destination);
  if (src == dst) throw InputError("source and destination are the same node");

  const auto& nodes = network.nodes();
  const std::size_t count = nodes.size();

  // Label = (distance, node path). Paths compare by node id, so equal-length
  // routes resolve deterministically.
  struct Label {
    double dist = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> path;
    std::vector<Leg> legs;
  };
  auto path_less = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](std::size_t x, std::size_t y) {
                                          return nodes[x].id < nodes[y].id;
                                        });
  };
  auto better = [&](double d, const std::vector<std::size_t>& p, const Label& cur) {
    if (nearly_equal_length(d, cur.dist)) return path_less(p, cur.path);
    return d < cur.dist;
  };

  std::vector<Label> best(count);
  best[src].dist = 0.0;
  best[src].path = {src};

  struct Entry {
    double dist;
    std::size_t node;
  };
  auto cmp = [](const Entry& a, const Entry& b) { return a.dist > b.dist; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
  frontier.push({0.0, src});
  std::vector<bool> settled(count, false);

  while (!frontier.empty()) {
    const Entry e = frontier.top();
    frontier.pop();
    if (settled[e.node]) continue;
    // Equal-distance entries can be queued in any order; settle the node only
    // once its label cannot improve from another equal-length predecessor.
    if (e.dist > best[e.node].dist && !nearly_equal_length(e.dist, best[e.node].dist)) continue;
    settled[e.node] = true;
    const Label& here = best[e.node];
    for (std::size_t s : network.incident(e.node)) {
      const Leg leg{s, network.leg_start(Leg{s, false}) != e.node};
      const std::size_t next = network.leg_end(leg);
      if (settled[next]) continue;
      const double d = here.dist + network.length(s);
      std::vector<std::size_t> path = here.path;
      path.push_back(next);
      // Parallel segments with equal length keep the lower segment index.
      if (better(d, path, best[next])) {
        best[next].dist = d;
        best[next].path = std::move(path);
        best[next].legs = here.legs;
        best[next].legs.push_back(leg);
        frontier.push({d, next});
      }
    }
  }

  if (best[dst].path.empty()) {
    throw InputError("unreachable: no route from '" + std::string(source) + "' to '" +
                     std::string(destination) + "'");
  }
  FlightPlan plan;
  plan.source = std::string(source);
  plan.destination = std::string(destination);
  plan.legs = best[dst].legs;
  return plan;
}

double plan_length(const SkywayNetwork& network, const FlightPlan& plan) {
  double total = 0.0;
  for (const Leg& leg : plan.legs) total += network.length(leg.segment);
  return total;
}

std::vector<std::string> plan_nodes(const SkywayNetwork& network, const FlightPlan& plan) {
  std::vector<std::string> ids;
  if (plan.legs.empty()) return ids;
  ids.push_back(network.nodes()[network.leg_start(plan.legs.front())].id);
  for (const Leg& leg : plan.legs) ids.push_back(network.nodes()[network.leg_end(leg)].id);
  return ids;
}

void validate_plan(const SkywayNetwork& network, const FlightPlan& plan) {
  if (plan.legs.empty()) throw InputError("plan for '" + plan.drone_id + "' has no legs");
  std::size_t at = network.node_index(plan.source);
  for (const Leg& leg : plan.legs) {
    if (leg.segment >= network.segments().size()) {
      throw InputError("plan for '" + plan.drone_id + "' references a missing segment");
    }
    if (network.leg_start(leg) != at) {
      throw InputError("plan for '" + plan.drone_id + "' is not a connected walk");
    }
    at = network.leg_end(leg);
  }
  if (at != network.node_index(plan.destination)) {
    throw InputError("plan for '" + plan.drone_id + "' does not end at its destination");
  }
}

nlohmann::json network_to_json(const SkywayNetwork& network) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const Node& n : network.nodes()) {
    doc["nodes"].push_back({{"id", n.id},
                            {"x", n.position.x},
                            {"y", n.position.y},
                            {"z", n.position.z},
                            {"recharge_pads", n.recharge_pads},
                            {"waiting_pads", n.waiting_pads},
                            {"hover_capacity", n.hover_capacity}});
  }
  doc["segments"] = nlohmann::json::array();
  for (const Segment& s : network.segments()) {
    nlohmann::json wps = nlohmann::json::array();
    for (const Vec3& p : s.waypoints) wps.push_back({p.x, p.y, p.z});
    doc["segments"].push_back(
        {{"from", s.from}, {"to", s.to}, {"waypoints", wps}, {"wind", to_string(s.wind)}});
  }
  return doc;
}

SkywayNetwork network_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Node> nodes;
    for (const auto& n : doc.at("nodes")) {
      Node node;
      node.id = n.at("id").get<std::string>();
      node.position = {n.at("x").get<double>(), n.at("y").get<double>(), n.at("z").get<double>()};
      node.recharge_pads = n.value("recharge_pads", 0);
      node.waiting_pads = n.value("waiting_pads", 0);
      node.hover_capacity = n.value("hover_capacity", 0);
      nodes.push_back(std::move(node));
    }
    std::vector<Segment> segments;
    for (const auto& s : doc.at("segments")) {
      Segment seg;
      seg.from = s.at("from").get<std::string>();
      seg.to = s.at("to").get<std::string>();
      if (s.contains("waypoints")) {
        for (const auto& p : s.at("waypoints")) {
          if (!p.is_array() || p.size() != 3) throw InputError("waypoint must be [x, y, z]");
          seg.waypoints.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
      }
      seg.wind = parse_wind(s.value("wind", std::string("none")));
      segments.push_back(std::move(seg));
    }
    return build_network(std::move(nodes), std::move(segments));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed network description: ") + e.what());
  }
}

SkywayNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("network file not found");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("network file is not valid JSON: ") + e.what());
  }
  return network_from_json(doc);
}

}  // namespace skyway
