#include "mobsim/sim/topology.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <tuple>

namespace mobsim::sim {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 7> kKindNames{{
    {NodeKind::router, "router"},
    {NodeKind::home_agent, "home-agent"},
    {NodeKind::map, "map"},
    {NodeKind::access_point, "access-point"},
    {NodeKind::mobile_node, "mobile-node"},
    {NodeKind::correspondent_node, "correspondent-node"},
    {NodeKind::multicast_router, "multicast-router"},
}};

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

}  // namespace

std::string_view to_string(NodeKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  return std::nullopt;
}

Unreachable::Unreachable(std::string_view from, std::string_view to)
    : std::runtime_error("no route from " + std::string(from) + " to " + std::string(to)) {}

NodeId Topology::add_node(std::string name, NodeKind kind) {
  if (find(name)) throw TopologyError("duplicate node name '" + name + "'");
  const auto id = static_cast<NodeId>(nodes_.size());
  Node n;
  n.id = id;
  n.name = std::move(name);
  n.kind = kind;
  nodes_.push_back(std::move(n));
  attached_.emplace_back();
  finalized_ = false;
  return id;
}

void Topology::add_link(NodeId a, NodeId b, Duration latency, double epsilon) {
  check(a);
  check(b);
  if (a == b) throw TopologyError("self link on '" + node(a).name + "'");
  if (latency <= Duration::zero())
    throw TopologyError("link " + node(a).name + "-" + node(b).name + " latency must be positive");
  if (epsilon < 0.0) throw TopologyError("link epsilon must be >= 0");
  if (is_mobile(a) || is_mobile(b)) throw TopologyError("mobile nodes attach to access points, not links");
  links_.push_back(Link{a, b, Hop{latency, epsilon}, true});
  finalized_ = false;
}

Node& Topology::node(NodeId id) {
  check(id);
  return nodes_[index_of(id)];
}

const Node& Topology::node(NodeId id) const {
  check(id);
  return nodes_[index_of(id)];
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return n.id;
  return std::nullopt;
}

NodeId Topology::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw UnknownNode(std::string(name));
}

void Topology::check(NodeId id) const {
  if (index_of(id) >= nodes_.size()) throw UnknownNode("#" + std::to_string(index_of(id)));
}

void Topology::finalize() {
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::access_point && n.radio.latency < Duration::zero())
      throw TopologyError("access point '" + n.name + "' radio latency must be >= 0");
  }
  compute_routes();
  // Fixed nodes must form one connected component.
  std::optional<NodeId> first;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::mobile_node) continue;
    if (!first) {
      first = n.id;
      continue;
    }
    if (dist_[index_of(*first) * nodes_.size() + index_of(n.id)] == kInf)
      throw TopologyError("graph is disconnected: no path from " + nodes_[index_of(*first)].name + " to " + n.name);
  }
  finalized_ = true;
}

void Topology::compute_routes() {
  const std::size_t n = nodes_.size();
  pred_link_.assign(n * n, -1);
  dist_.assign(n * n, kInf);

  std::vector<std::vector<std::int32_t>> adj(n);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!links_[i].up) continue;
    adj[index_of(links_[i].a)].push_back(static_cast<std::int32_t>(i));
    adj[index_of(links_[i].b)].push_back(static_cast<std::int32_t>(i));
  }

  for (std::size_t src = 0; src < n; ++src) {
    if (nodes_[src].kind == NodeKind::mobile_node) continue;
    std::vector<std::int64_t> hops(n, kInf);
    auto* dist = &dist_[src * n];
    auto* pred = &pred_link_[src * n];
    using Item = std::tuple<std::int64_t, std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    hops[src] = 0;
    pq.emplace(0, 0, src);
    while (!pq.empty()) {
      auto [d, h, u] = pq.top();
      pq.pop();
      if (d != dist[u] || h != hops[u]) continue;
      for (std::int32_t li : adj[u]) {
        const Link& l = links_[static_cast<std::size_t>(li)];
        const std::size_t v = index_of(l.a) == u ? index_of(l.b) : index_of(l.a);
        const std::int64_t nd = d + l.hop.latency.count();
        const std::int64_t nh = h + 1;
        if (nd < dist[v] || (nd == dist[v] && nh < hops[v])) {
          dist[v] = nd;
          hops[v] = nh;
          pred[v] = li;
          pq.emplace(nd, nh, v);
        }
      }
    }
  }
}

void Topology::set_link_up(NodeId a, NodeId b, bool up) {
  bool found = false;
  for (auto& l : links_) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) {
      l.up = up;
      found = true;
    }
  }
  if (!found) throw TopologyError("no link " + node(a).name + "-" + node(b).name);
  compute_routes();
}

void Topology::attach(NodeId mobile, NodeId access_point) {
  if (!is_mobile(mobile)) throw TopologyError("'" + node(mobile).name + "' is not a mobile node");
  if (node(access_point).kind != NodeKind::access_point)
    throw TopologyError("'" + node(access_point).name + "' is not an access point");
  attached_[index_of(mobile)] = access_point;
}

void Topology::detach(NodeId mobile) {
  check(mobile);
  attached_[index_of(mobile)].reset();
}

std::optional<NodeId> Topology::attachment(NodeId mobile) const {
  check(mobile);
  return attached_[index_of(mobile)];
}

NodeId Topology::anchor_of(NodeId id) const {
  if (!is_mobile(id)) return id;
  auto ap = attachment(id);
  if (!ap) throw Unreachable(node(id).name + " (detached)", "network");
  return *ap;
}

void Topology::append_fixed(std::vector<Hop>& out, NodeId src, NodeId dst) const {
  if (src == dst) return;
  const std::size_t n = nodes_.size();
  const std::size_t s = index_of(src);
  if (dist_[s * n + index_of(dst)] == kInf) throw Unreachable(node(src).name, node(dst).name);
  std::vector<Hop> rev;
  std::size_t cur = index_of(dst);
  while (cur != s) {
    const Link& l = links_[static_cast<std::size_t>(pred_link_[s * n + cur])];
    rev.push_back(l.hop);
    cur = index_of(l.a) == cur ? index_of(l.b) : index_of(l.a);
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

std::vector<Hop> Topology::route(NodeId src, NodeId dst) const {
  if (!finalized_) throw TopologyError("topology not finalized");
  check(src);
  check(dst);
  std::vector<Hop> hops;
  if (src == dst) return hops;
  const NodeId a = anchor_of(src);
  const NodeId b = anchor_of(dst);
  if (is_mobile(src)) hops.push_back(node(a).radio);
  append_fixed(hops, a, b);
  if (is_mobile(dst)) hops.push_back(node(b).radio);
  return hops;
}

Duration Topology::path_delay(NodeId src, NodeId dst) const {
  Duration total{};
  for (const Hop& h : route(src, dst)) total += h.latency;
  return total;
}

std::vector<NodeId> Topology::node_path(NodeId src, NodeId dst) const {
  if (!finalized_) throw TopologyError("topology not finalized");
  const std::size_t n = nodes_.size();
  const std::size_t s = index_of(src);
  if (src == dst) return {src};
  if (dist_[s * n + index_of(dst)] == kInf) throw Unreachable(node(src).name, node(dst).name);
  std::vector<NodeId> path{dst};
  std::size_t cur = index_of(dst);
  while (cur != s) {
    const Link& l = links_[static_cast<std::size_t>(pred_link_[s * n + cur])];
    cur = index_of(l.a) == cur ? index_of(l.b) : index_of(l.a);
    path.push_back(static_cast<NodeId>(cur));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace mobsim::sim
