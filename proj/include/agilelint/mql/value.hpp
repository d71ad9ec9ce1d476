#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "agilelint/graph_store.hpp"

namespace agilelint::mql {

struct NodeRef {
  NodeId id;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

struct Value;
using List = std::vector<Value>;

/// Runtime value of the query language. The monostate alternative is null,
/// produced by reading a property a node does not have.
struct Value {
  using Data = std::variant<std::monostate, bool, std::int64_t, double, std::string, Timestamp,
                            NodeRef, List>;
  Data data;

  Value() = default;
  Value(bool v) : data(v) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(std::int64_t{v}) {}
  Value(double v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(Timestamp v) : data(v) {}
  Value(NodeRef v) : data(v) {}
  Value(List v) : data(std::move(v)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(data); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }
  bool is_list() const { return std::holds_alternative<List>(data); }
  double as_number() const;

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&data);
  }
};

Value from_property(const PropertyValue& value);

/// Strict weak order over all values, numbers compared across int/float.
/// Used for grouping, DISTINCT and deterministic sorting.
std::strong_ordering total_order(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return total_order(a, b) < 0; }
};
struct RowLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const;
};

/// Stable identifying reference for a node: its `url`, else `sha`, `login`,
/// `path`, `title`, `name`; falls back to `<Label>:<id>`.
std::string node_ref(const GraphStore& store, NodeId id);

/// Human readable rendering. Top-level strings are bare, strings nested in
/// lists are double-quoted; nodes render as node_ref.
std::string render(const Value& value, const GraphStore& store);

std::string format_number(double value);

}  // namespace agilelint::mql
