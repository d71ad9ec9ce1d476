#pragma once

#include <set>
#include <string>
#include <string_view>

#include "agilelint/mql/ast.hpp"

namespace agilelint::mql {

/// Parses and scope-checks a query.
///
/// Throws SyntaxError with code LexError, ParseError (offset, expected,
/// found) or ScopeError (offset of the offending variable).
Query parse(std::string_view text);

/// Canonical single-line text; parse(to_text(q)) == q.
std::string to_text(const Query& query);
std::string to_text(const Expr& expr);

/// Names of all placeholders still present in the query.
std::set<std::string> placeholders(const Query& query);

/// Output column names of the final RETURN.
std::vector<std::string> return_columns(const Query& query);

}  // namespace agilelint::mql
