#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobsim/sim/time.hpp"

namespace mobsim::sim {

enum class NodeId : std::uint32_t {};
constexpr std::size_t index_of(NodeId id) { return static_cast<std::size_t>(id); }

enum class NodeKind {
  router,
  home_agent,
  map,
  access_point,
  mobile_node,
  correspondent_node,
  multicast_router,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

class UnknownNode : public std::invalid_argument {
 public:
  explicit UnknownNode(const std::string& what) : std::invalid_argument("unknown node: " + what) {}
};

class Unreachable : public std::runtime_error {
 public:
  Unreachable(std::string_view from, std::string_view to);
};

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One link traversal; epsilon scales the uniform per-traversal noise.
struct Hop {
  Duration latency{};
  double epsilon = 0.0;
};

struct Node {
  NodeId id{};
  std::string name;
  NodeKind kind = NodeKind::router;
  // Access points only: the radio hop to an attached mobile, MAP domain and
  // home-network membership.
  Hop radio{Duration{500}, 0.0};
  std::optional<NodeId> map_domain;
  std::optional<NodeId> home_of;
};

struct Link {
  NodeId a{};
  NodeId b{};
  Hop hop;
  bool up = true;
};

/// Static network graph plus the mobile attachment table.
///
/// Routes between fixed nodes are shortest paths by total latency, computed by
/// finalize() and again whenever a link changes state. Ties go to the path
/// with fewer hops, then to the one discovered first in node-index order.
class Topology {
 public:
  NodeId add_node(std::string name, NodeKind kind);
  void add_link(NodeId a, NodeId b, Duration latency, double epsilon = 0.0);

  Node& node(NodeId id);
  const Node& node(NodeId id) const;
  std::optional<NodeId> find(std::string_view name) const;
  NodeId require(std::string_view name) const;
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }

  /// Validates the graph and computes routes. Must precede any path query.
  void finalize();
  bool finalized() const { return finalized_; }

  /// Takes a link down or up at runtime; routes are recomputed.
  void set_link_up(NodeId a, NodeId b, bool up);

  void attach(NodeId mobile, NodeId access_point);
  void detach(NodeId mobile);
  std::optional<NodeId> attachment(NodeId mobile) const;

  /// Link traversals from src to dst. Mobile endpoints must be attached.
  std::vector<Hop> route(NodeId src, NodeId dst) const;
  /// Sum of one-way link latencies along route(src, dst).
  Duration path_delay(NodeId src, NodeId dst) const;
  /// Fixed-node path as a node sequence (both ends included).
  std::vector<NodeId> node_path(NodeId src, NodeId dst) const;

  bool is_mobile(NodeId id) const { return node(id).kind == NodeKind::mobile_node; }

 private:
  void check(NodeId id) const;
  void compute_routes();
  void append_fixed(std::vector<Hop>& out, NodeId src, NodeId dst) const;
  NodeId anchor_of(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::optional<NodeId>> attached_;
  // Row-major [src][dst]: predecessor link index on the shortest path from
  // src, or -1 when unreachable or src == dst.
  std::vector<std::int32_t> pred_link_;
  std::vector<std::int64_t> dist_;
  bool finalized_ = false;
};

}  // namespace mobsim::sim
