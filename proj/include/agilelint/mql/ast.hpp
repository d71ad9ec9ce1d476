#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agilelint/graph_store.hpp"
#include "agilelint/mql/value.hpp"

namespace agilelint::mql {

enum class ExprKind { Literal, List, Variable, Property, Placeholder, Compare, In, And, Or, Not, Call };
enum class CompareOp { Eq, Neq, Lt, Le, Gt, Ge };
enum class Function { Collect, Count, Length, Avg, Sum, Min, Max };

bool is_aggregate(Function fn);
std::string_view to_string(Function fn);
std::string_view to_string(CompareOp op);

struct Expr {
  ExprKind kind = ExprKind::Literal;
  Value literal;             // Literal
  std::string name;          // Variable, Property (the variable), Placeholder
  std::string key;           // Property
  CompareOp op = CompareOp::Eq;
  Function fn = Function::Count;
  bool distinct = false;     // Call: collect(DISTINCT ...)
  bool quoted = false;       // Placeholder written as "{name}"
  std::vector<Expr> args;    // operands, list elements, call arguments
  std::size_t offset = 0;

  /// Structural equality; source offsets are ignored.
  friend bool operator==(const Expr& a, const Expr& b);
};

bool contains_aggregate(const Expr& expr);

struct NodePattern {
  std::optional<std::string> variable;
  std::optional<NodeLabel> label;
  std::size_t offset = 0;

  friend bool operator==(const NodePattern& a, const NodePattern& b) {
    return a.variable == b.variable && a.label == b.label;
  }
};

enum class EdgeDirection { left, right, undirected };

struct EdgePattern {
  std::optional<RelType> type;
  EdgeDirection direction = EdgeDirection::undirected;

  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

/// Alternating chain: nodes.size() == edges.size() + 1.
struct Pattern {
  std::vector<NodePattern> nodes;
  std::vector<EdgePattern> edges;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct Item {
  Expr expr;
  std::string name;  // output column
  bool aliased = false;

  friend bool operator==(const Item&, const Item&) = default;
};

struct MatchClause {
  std::vector<Pattern> patterns;
  friend bool operator==(const MatchClause&, const MatchClause&) = default;
};
struct WhereClause {
  Expr condition;
  friend bool operator==(const WhereClause&, const WhereClause&) = default;
};
struct WithClause {
  std::vector<Item> items;
  friend bool operator==(const WithClause&, const WithClause&) = default;
};
struct ReturnClause {
  std::vector<Item> items;
  friend bool operator==(const ReturnClause&, const ReturnClause&) = default;
};

using Clause = std::variant<MatchClause, WhereClause, WithClause, ReturnClause>;

struct Query {
  std::vector<Clause> clauses;  // MATCH first, RETURN last

  friend bool operator==(const Query&, const Query&) = default;
};

}  // namespace agilelint::mql
