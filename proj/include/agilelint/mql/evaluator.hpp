#pragma once

#include <map>
#include <string>
#include <vector>

#include "agilelint/graph_store.hpp"
#include "agilelint/mql/ast.hpp"
#include "agilelint/mql/value.hpp"

namespace agilelint::mql {

using PlaceholderBindings = std::map<std::string, Value, std::less<>>;

/// Replaces every placeholder by its bound value.
///
/// A placeholder standing directly on the right of IN must be bound to a
/// list. Inside a list literal a list binding is spliced element-wise, so
/// `[{sprint_list}]` becomes the bound list. Everywhere else the binding
/// must be a scalar. Throws Error(UnboundPlaceholder) or
/// Error(PlaceholderTypeMismatch).
Query bind_placeholders(const Query& query, const PlaceholderBindings& bindings);

/// Tabular query result. Rows are sorted by rendered cell text, ties broken
/// by the node ids they contain.
struct BindingTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  std::size_t column_index(std::string_view name) const;  // npos when absent
};

/// Runs a fully bound query over a read-only store. Throws Error(TypeError)
/// when a predicate compares incompatible values.
BindingTable evaluate(const Query& query, const GraphStore& store);

/// parse + bind + evaluate.
BindingTable run_query(std::string_view text, const PlaceholderBindings& bindings,
                       const GraphStore& store);

/// Sorts rows into the canonical BindingTable order.
void sort_rows(BindingTable& table, const GraphStore& store);

}  // namespace agilelint::mql
