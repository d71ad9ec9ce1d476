#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agilelint/graph_store.hpp"
#include "agilelint/mql/ast.hpp"
#include "agilelint/mql/value.hpp"
#include "rng.hpp"

namespace agilelint::testing {

// Random graphs and random well-formed queries, plus a brute-force evaluator
// that enumerates every assignment of nodes and edges to pattern atoms. The
// oracle shares no code with the query engine; it works on its own query
// description and only renders that description to text for the engine.

/// Nodes carry `n` (integer 0..3) and `s` ("x", "y" or "z"), each present
/// with probability 0.8. Labels are Issue, Label and Event; relationship
/// types are issue, labels and milestone. Self-loops and parallel edges occur.
GraphStore random_graph(Rng& rng, int max_nodes = 12, int max_edges = 20);

struct QAtom {
  int var = -1;  // -1 for an anonymous node
  std::optional<NodeLabel> label;
};

struct QEdge {
  std::optional<RelType> type;
  mql::EdgeDirection direction = mql::EdgeDirection::undirected;
};

struct QPattern {
  std::vector<QAtom> atoms;
  std::vector<QEdge> edges;  // edges[i] joins atoms[i] and atoms[i + 1]
};

enum class QPredKind { NumCompare, TextEquals, NumIn, SameNode, And, Or, Not };

struct QPred {
  QPredKind kind = QPredKind::NumCompare;
  int var = 0;
  int other = 0;  // SameNode
  mql::CompareOp op = mql::CompareOp::Eq;
  std::int64_t number = 0;
  std::string text;
  std::vector<std::int64_t> list;
  std::vector<QPred> args;
};

/// A projected term: a node variable or one of its properties.
struct QTerm {
  int var = 0;
  std::string property;  // "", "n" or "s"
};

enum class QAggregate { None, Count, Collect, Sum, Avg, Min, Max };

struct QProjection {
  std::vector<QTerm> keys;
  QAggregate aggregate = QAggregate::None;
  QTerm argument;
  bool distinct = false;
  bool via_with = false;                 // WITH keys, agg [WHERE ...] RETURN ...
  std::optional<std::int64_t> having;    // agg > k, or length(agg) > k for collect
};

struct QQuery {
  std::vector<QPattern> patterns;
  std::optional<QPred> where;
  QProjection projection;
};

/// At most two patterns, four node atoms, three predicates and one aggregate.
QQuery random_query(Rng& rng);

std::string to_query_text(const QQuery& query);

using Row = std::vector<mql::Value>;

/// Brute-force result rows in no particular order.
std::vector<Row> oracle_rows(const QQuery& query, const GraphStore& store);

/// Each row rendered cell by cell (list cells sorted), rows sorted: two
/// results are equal as multisets iff their canonical forms are equal.
std::vector<std::vector<std::string>> canonical(const std::vector<Row>& rows);
std::string describe(const std::vector<std::vector<std::string>>& rows);

}  // namespace agilelint::testing
