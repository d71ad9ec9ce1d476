#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agilelint/time.hpp"

namespace agilelint {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

using TextList = std::vector<std::string>;

/// Typed attribute value stored on nodes and edges.
using PropertyValue = std::variant<std::string, std::int64_t, double, bool, Timestamp, TextList>;

using Properties = std::map<std::string, PropertyValue, std::less<>>;

enum class NodeLabel : std::uint8_t { Issue, Event, Label, Milestone, Commit, File, TestRun, Developer };
enum class RelType : std::uint8_t { issue, labels, milestone, author, changes, tested_by, parent };
enum class Direction : std::uint8_t { out, in, any };

inline constexpr std::size_t kNodeLabelCount = 8;
inline constexpr std::size_t kRelTypeCount = 7;

std::string_view to_string(NodeLabel label);
std::string_view to_string(RelType type);
std::optional<NodeLabel> parse_node_label(std::string_view text);
std::optional<RelType> parse_rel_type(std::string_view text);

struct Node {
  NodeId id;
  NodeLabel label;
  Properties props;

  const PropertyValue* find(std::string_view key) const;
};

struct Edge {
  EdgeId id;
  RelType type;
  NodeId source;
  NodeId target;
  Properties props;
};

struct Incidence {
  EdgeId edge;
  NodeId node;  // the node at the other end

  friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// Append-only property graph over the closed artifact schema.
///
/// Single writer while loading; afterwards the store is read-only and may be
/// shared across threads.
class GraphStore {
 public:
  NodeId add_node(NodeLabel label, Properties props = {});
  /// Throws Error(UnknownLabel) for names outside the schema.
  NodeId add_node(std::string_view label, Properties props = {});

  /// Throws Error(DanglingEndpoint) when either endpoint is missing.
  EdgeId add_edge(NodeId source, RelType type, NodeId target, Properties props = {});
  EdgeId add_edge(NodeId source, std::string_view type, NodeId target, Properties props = {});

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Throws Error(UnknownNode).
  const Node& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;
  bool contains(NodeId id) const noexcept { return id < nodes_.size(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Ascending node ids carrying `label`.
  std::span<const NodeId> nodes_with_label(NodeLabel label) const noexcept;

  /// Nodes of `label` whose property `key` equals `value`, ascending ids.
  std::vector<NodeId> find(NodeLabel label, std::string_view key, const PropertyValue& value) const;

  /// Incident edges filtered by type and direction, ascending edge id. A
  /// self-loop is reported once even for Direction::any.
  std::vector<Incidence> neighbors(NodeId id, std::optional<RelType> type, Direction dir) const;

  /// Unfiltered adjacency, ascending edge ids.
  std::span<const EdgeId> out_edges(NodeId id) const { return adjacency_.at(id).out; }
  std::span<const EdgeId> in_edges(NodeId id) const { return adjacency_.at(id).in; }

 private:
  struct Adjacency {
    std::vector<EdgeId> out;
    std::vector<EdgeId> in;
  };
  using ValueIndex = std::map<PropertyValue, std::vector<NodeId>>;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Adjacency> adjacency_;
  std::array<std::vector<NodeId>, kNodeLabelCount> label_index_;
  std::array<std::map<std::string, ValueIndex, std::less<>>, kNodeLabelCount> property_index_;
};

}  // namespace agilelint
