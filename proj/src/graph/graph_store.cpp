#include "agilelint/graph_store.hpp"

#include <algorithm>

#include "agilelint/error.hpp"

namespace agilelint {

namespace {

constexpr std::array<std::string_view, kNodeLabelCount> kLabelNames = {
    "Issue", "Event", "Label", "Milestone", "Commit", "File", "TestRun", "Developer"};
constexpr std::array<std::string_view, kRelTypeCount> kRelNames = {
    "issue", "labels", "milestone", "author", "changes", "tested_by", "parent"};

}  // namespace

std::string_view to_string(NodeLabel label) { return kLabelNames[std::size_t(label)]; }
std::string_view to_string(RelType type) { return kRelNames[std::size_t(type)]; }

std::optional<NodeLabel> parse_node_label(std::string_view text) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == text) return NodeLabel(i);
  }
  return std::nullopt;
}

std::optional<RelType> parse_rel_type(std::string_view text) {
  for (std::size_t i = 0; i < kRelNames.size(); ++i) {
    if (kRelNames[i] == text) return RelType(i);
  }
  return std::nullopt;
}

const PropertyValue* Node::find(std::string_view key) const {
  auto it = props.find(key);
  return it == props.end() ? nullptr : &it->second;
}

NodeId GraphStore::add_node(NodeLabel label, Properties props) {
  auto id = NodeId(nodes_.size());
  auto& index = property_index_[std::size_t(label)];
  for (const auto& [key, value] : props) {
    auto it = index.find(key);
    if (it == index.end()) it = index.emplace(key, ValueIndex{}).first;
    it->second[value].push_back(id);
  }
  nodes_.push_back(Node{id, label, std::move(props)});
  adjacency_.emplace_back();
  label_index_[std::size_t(label)].push_back(id);
  return id;
}

NodeId GraphStore::add_node(std::string_view label, Properties props) {
  auto parsed = parse_node_label(label);
  if (!parsed) throw Error(ErrorCode::UnknownLabel, "unknown node label '" + std::string(label) + "'");
  return add_node(*parsed, std::move(props));
}

EdgeId GraphStore::add_edge(NodeId source, RelType type, NodeId target, Properties props) {
  if (!contains(source) || !contains(target)) {
    throw Error(ErrorCode::DanglingEndpoint,
                "edge endpoint " + std::to_string(contains(source) ? target : source) +
                    " does not exist");
  }
  auto id = EdgeId(edges_.size());
  edges_.push_back(Edge{id, type, source, target, std::move(props)});
  adjacency_[source].out.push_back(id);
  adjacency_[target].in.push_back(id);
  return id;
}

EdgeId GraphStore::add_edge(NodeId source, std::string_view type, NodeId target, Properties props) {
  auto parsed = parse_rel_type(type);
  if (!parsed) {
    throw Error(ErrorCode::UnknownRelType, "unknown relationship type '" + std::string(type) + "'");
  }
  return add_edge(source, *parsed, target, std::move(props));
}

const Node& GraphStore::node(NodeId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownNode, "no node with id " + std::to_string(id));
  return nodes_[id];
}

const Edge& GraphStore::edge(EdgeId id) const {
  if (id >= edges_.size()) {
    throw Error(ErrorCode::UnknownNode, "no edge with id " + std::to_string(id));
  }
  return edges_[id];
}

std::span<const NodeId> GraphStore::nodes_with_label(NodeLabel label) const noexcept {
  return label_index_[std::size_t(label)];
}

std::vector<NodeId> GraphStore::find(NodeLabel label, std::string_view key,
                                     const PropertyValue& value) const {
  const auto& index = property_index_[std::size_t(label)];
  auto by_key = index.find(key);
  if (by_key == index.end()) return {};
  auto by_value = by_key->second.find(value);
  if (by_value == by_key->second.end()) return {};
  return by_value->second;
}

std::vector<Incidence> GraphStore::neighbors(NodeId id, std::optional<RelType> type,
                                             Direction dir) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownNode, "no node with id " + std::to_string(id));
  const auto& adj = adjacency_[id];
  std::vector<Incidence> result;
  auto matches = [&](EdgeId e) { return !type || edges_[e].type == *type; };

  auto out_it = adj.out.begin();
  auto in_it = adj.in.begin();
  bool want_out = dir != Direction::in;
  bool want_in = dir != Direction::out;
  // Merge the two ascending lists; a self-loop appears in both and is emitted once.
  while ((want_out && out_it != adj.out.end()) || (want_in && in_it != adj.in.end())) {
    bool take_out = want_out && out_it != adj.out.end() &&
                    (!want_in || in_it == adj.in.end() || *out_it <= *in_it);
    EdgeId e;
    if (take_out) {
      e = *out_it++;
      if (want_in && in_it != adj.in.end() && *in_it == e) ++in_it;
      if (matches(e)) result.push_back({e, edges_[e].target});
    } else {
      e = *in_it++;
      if (matches(e)) result.push_back({e, edges_[e].source});
    }
  }
  return result;
}

}  // namespace agilelint
