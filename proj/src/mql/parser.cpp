#include "agilelint/mql/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>

#include "agilelint/error.hpp"
#include "agilelint/mql/lexer.hpp"

namespace agilelint::mql {

bool operator==(const Expr& a, const Expr& b) {
  return a.kind == b.kind && total_order(a.literal, b.literal) == 0 && a.name == b.name &&
         a.key == b.key && a.op == b.op && a.fn == b.fn && a.distinct == b.distinct &&
         a.quoted == b.quoted && a.args == b.args;
}

bool is_aggregate(Function fn) { return fn != Function::Length; }

std::string_view to_string(Function fn) {
  switch (fn) {
    case Function::Collect: return "collect";
    case Function::Count: return "count";
    case Function::Length: return "length";
    case Function::Avg: return "avg";
    case Function::Sum: return "sum";
    case Function::Min: return "min";
    case Function::Max: return "max";
  }
  return "?";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Neq: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

bool contains_aggregate(const Expr& expr) {
  if (expr.kind == ExprKind::Call && is_aggregate(expr.fn)) return true;
  for (const auto& arg : expr.args) {
    if (contains_aggregate(arg)) return true;
  }
  return false;
}

namespace {

std::optional<Function> parse_function(std::string_view name) {
  static const std::map<std::string_view, Function> kFunctions = {
      {"collect", Function::Collect}, {"count", Function::Count}, {"length", Function::Length},
      {"avg", Function::Avg},         {"sum", Function::Sum},     {"min", Function::Min},
      {"max", Function::Max}};
  auto it = kFunctions.find(name);
  if (it == kFunctions.end()) return std::nullopt;
  return it->second;
}

// Placeholder text embedded in a string literal, e.g. "{team}".
std::optional<std::string> quoted_placeholder(const std::string& text) {
  if (text.size() < 3 || text.front() != '{' || text.back() != '}') return std::nullopt;
  std::string name = text.substr(1, text.size() - 2);
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return std::nullopt;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
  }
  return name;
}

enum class VarKind { Node, Value };
using Scope = std::map<std::string, VarKind, std::less<>>;

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {
    tokens_.push_back({TokenKind::End, "", text.size()});
  }

  Query run() {
    Query query;
    if (!at(TokenKind::Match)) fail("MATCH");
    while (!at(TokenKind::Return)) {
      switch (current().kind) {
        case TokenKind::Match: query.clauses.emplace_back(match_clause()); break;
        case TokenKind::Where: query.clauses.emplace_back(where_clause()); break;
        case TokenKind::With: query.clauses.emplace_back(with_clause()); break;
        default: fail("MATCH, WHERE, WITH or RETURN");
      }
    }
    query.clauses.emplace_back(return_clause());
    if (!at(TokenKind::End)) fail("end of query");
    return query;
  }

 private:
  const Token& current() const { return tokens_[pos_]; }
  bool at(TokenKind kind) const { return current().kind == kind; }

  const Token& advance() { return tokens_[pos_++]; }

  bool accept(TokenKind kind) {
    if (!at(kind)) return false;
    ++pos_;
    return true;
  }

  const Token& expect(TokenKind kind) {
    if (!at(kind)) fail(std::string(describe(kind)));
    return advance();
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& tok = current();
    std::string found = tok.kind == TokenKind::End ? "end of input"
                        : tok.text.empty()          ? std::string(describe(tok.kind))
                                                    : tok.text;
    throw SyntaxError(ErrorCode::ParseError, tok.offset, expected, found,
                      "expected " + expected + " but found '" + found + "' at offset " +
                          std::to_string(tok.offset));
  }

  [[noreturn]] void scope_error(const std::string& variable, std::size_t offset,
                                const std::string& why) const {
    throw SyntaxError(ErrorCode::ScopeError, offset, "", variable,
                      "variable '" + variable + "' " + why + " at offset " + std::to_string(offset));
  }

  // --- clauses -----------------------------------------------------------

  MatchClause match_clause() {
    expect(TokenKind::Match);
    MatchClause clause;
    do {
      clause.patterns.push_back(pattern());
    } while (accept(TokenKind::Comma));
    for (const auto& p : clause.patterns) {
      for (const auto& n : p.nodes) {
        if (!n.variable) continue;
        auto it = scope_.find(*n.variable);
        if (it == scope_.end()) {
          scope_.emplace(*n.variable, VarKind::Node);
        } else if (it->second != VarKind::Node) {
          scope_error(*n.variable, n.offset, "is not a node");
        }
      }
    }
    return clause;
  }

  Pattern pattern() {
    Pattern p;
    p.nodes.push_back(node_pattern());
    while (at(TokenKind::Dash) || at(TokenKind::Lt)) {
      p.edges.push_back(edge_pattern());
      p.nodes.push_back(node_pattern());
    }
    return p;
  }

  NodePattern node_pattern() {
    NodePattern node;
    node.offset = expect(TokenKind::LParen).offset;
    if (at(TokenKind::Ident)) {
      node.offset = current().offset;
      node.variable = advance().text;
    }
    if (accept(TokenKind::Colon)) {
      const Token& label = expect(TokenKind::Ident);
      node.label = parse_node_label(label.text);
      if (!node.label) {
        --pos_;
        fail("node label");
      }
    }
    expect(TokenKind::RParen);
    return node;
  }

  EdgePattern edge_pattern() {
    EdgePattern edge;
    bool left = accept(TokenKind::Lt);
    expect(TokenKind::Dash);
    expect(TokenKind::LBracket);
    if (accept(TokenKind::Colon)) {
      const Token& type = expect(TokenKind::Ident);
      edge.type = parse_rel_type(type.text);
      if (!edge.type) {
        --pos_;
        fail("relationship type");
      }
    }
    expect(TokenKind::RBracket);
    expect(TokenKind::Dash);
    bool right = accept(TokenKind::Gt);
    if (left && right) {
      --pos_;
      fail("'-'");
    }
    edge.direction = left ? EdgeDirection::left : right ? EdgeDirection::right : EdgeDirection::undirected;
    return edge;
  }

  WhereClause where_clause() {
    expect(TokenKind::Where);
    Expr condition = or_expr();
    check_expr(condition, /*allow_aggregates=*/false);
    return WhereClause{std::move(condition)};
  }

  std::vector<Item> items(bool require_alias) {
    std::vector<Item> result;
    do {
      Item item;
      std::size_t start = current().offset;
      item.expr = or_expr();
      if (accept(TokenKind::As)) {
        item.name = expect(TokenKind::Ident).text;
        item.aliased = true;
      } else if (item.expr.kind == ExprKind::Variable) {
        item.name = item.expr.name;
      } else if (require_alias) {
        fail("AS");
      } else {
        item.name = to_text(item.expr);
      }
      check_expr(item.expr, /*allow_aggregates=*/true);
      for (const auto& previous : result) {
        if (previous.name == item.name) {
          throw SyntaxError(ErrorCode::ParseError, start, "unique column name", item.name,
                            "duplicate column '" + item.name + "'");
        }
      }
      result.push_back(std::move(item));
    } while (accept(TokenKind::Comma));
    return result;
  }

  Scope projected_scope(const std::vector<Item>& items) const {
    Scope next;
    for (const auto& item : items) {
      bool node = item.expr.kind == ExprKind::Variable &&
                  scope_.at(item.expr.name) == VarKind::Node;
      next.emplace(item.name, node ? VarKind::Node : VarKind::Value);
    }
    return next;
  }

  WithClause with_clause() {
    expect(TokenKind::With);
    WithClause clause{items(/*require_alias=*/true)};
    scope_ = projected_scope(clause.items);
    return clause;
  }

  ReturnClause return_clause() {
    expect(TokenKind::Return);
    ReturnClause clause{items(/*require_alias=*/false)};
    scope_ = projected_scope(clause.items);
    return clause;
  }

  // Scope and aggregate placement checks for one expression tree.
  void check_expr(const Expr& expr, bool allow_aggregates, bool inside_aggregate = false) {
    switch (expr.kind) {
      case ExprKind::Variable:
      case ExprKind::Property:
        if (!scope_.contains(expr.name)) scope_error(expr.name, expr.offset, "is not in scope");
        break;
      case ExprKind::Call:
        if (is_aggregate(expr.fn)) {
          if (!allow_aggregates) {
            throw SyntaxError(ErrorCode::ParseError, expr.offset, "non-aggregate expression",
                              std::string(to_string(expr.fn)),
                              "aggregate functions are only allowed in WITH and RETURN");
          }
          if (inside_aggregate) {
            throw SyntaxError(ErrorCode::ParseError, expr.offset, "non-aggregate argument",
                              std::string(to_string(expr.fn)), "aggregate functions cannot be nested");
          }
          for (const auto& arg : expr.args) check_expr(arg, allow_aggregates, true);
          return;
        }
        break;
      default:
        break;
    }
    for (const auto& arg : expr.args) check_expr(arg, allow_aggregates, inside_aggregate);
  }

  // --- expressions -------------------------------------------------------

  static Expr binary(ExprKind kind, Expr lhs, Expr rhs, std::size_t offset) {
    Expr e;
    e.kind = kind;
    e.offset = offset;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (at(TokenKind::Or)) {
      std::size_t offset = advance().offset;
      lhs = binary(ExprKind::Or, std::move(lhs), and_expr(), offset);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (at(TokenKind::And)) {
      std::size_t offset = advance().offset;
      lhs = binary(ExprKind::And, std::move(lhs), not_expr(), offset);
    }
    return lhs;
  }

  Expr not_expr() {
    if (at(TokenKind::Not)) {
      Expr e;
      e.kind = ExprKind::Not;
      e.offset = advance().offset;
      e.args.push_back(not_expr());
      return e;
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = primary();
    std::optional<CompareOp> op;
    switch (current().kind) {
      case TokenKind::Eq: op = CompareOp::Eq; break;
      case TokenKind::Neq: op = CompareOp::Neq; break;
      case TokenKind::Lt: op = CompareOp::Lt; break;
      case TokenKind::Le: op = CompareOp::Le; break;
      case TokenKind::Gt: op = CompareOp::Gt; break;
      case TokenKind::Ge: op = CompareOp::Ge; break;
      case TokenKind::In: {
        std::size_t offset = advance().offset;
        return binary(ExprKind::In, std::move(lhs), primary(), offset);
      }
      default: return lhs;
    }
    std::size_t offset = advance().offset;
    Expr e = binary(ExprKind::Compare, std::move(lhs), primary(), offset);
    e.op = *op;
    return e;
  }

  Expr primary() {
    const Token& tok = current();
    Expr e;
    e.offset = tok.offset;
    switch (tok.kind) {
      case TokenKind::Int:
      case TokenKind::Float:
        e.literal = number(advance(), false);
        return e;
      case TokenKind::Dash: {
        advance();
        if (!at(TokenKind::Int) && !at(TokenKind::Float)) fail("number");
        e.literal = number(advance(), true);
        return e;
      }
      case TokenKind::String: {
        const std::string& text = advance().text;
        if (auto name = quoted_placeholder(text)) {
          e.kind = ExprKind::Placeholder;
          e.name = *name;
          e.quoted = true;
        } else {
          e.literal = text;
        }
        return e;
      }
      case TokenKind::True:
      case TokenKind::False:
        e.literal = advance().kind == TokenKind::True;
        return e;
      case TokenKind::Placeholder:
        e.kind = ExprKind::Placeholder;
        e.name = advance().text;
        return e;
      case TokenKind::LBracket: {
        advance();
        e.kind = ExprKind::List;
        if (!at(TokenKind::RBracket)) {
          do {
            e.args.push_back(or_expr());
          } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RBracket);
        return e;
      }
      case TokenKind::LParen: {
        advance();
        Expr inner = or_expr();
        expect(TokenKind::RParen);
        return inner;
      }
      case TokenKind::Ident: {
        std::string name = advance().text;
        if (at(TokenKind::LParen)) return call(std::move(name), e.offset);
        if (accept(TokenKind::Dot)) {
          e.kind = ExprKind::Property;
          e.name = std::move(name);
          e.key = expect(TokenKind::Ident).text;
          return e;
        }
        e.kind = ExprKind::Variable;
        e.name = std::move(name);
        return e;
      }
      default:
        fail("expression");
    }
  }

  Expr call(std::string name, std::size_t offset) {
    auto fn = parse_function(name);
    if (!fn) {
      --pos_;
      fail("function name (collect, count, length, avg, sum, min, max)");
    }
    expect(TokenKind::LParen);
    Expr e;
    e.kind = ExprKind::Call;
    e.fn = *fn;
    e.offset = offset;
    if (at(TokenKind::Distinct)) {
      if (*fn != Function::Collect) fail("expression");
      advance();
      e.distinct = true;
    }
    e.args.push_back(or_expr());
    expect(TokenKind::RParen);
    return e;
  }

  Value number(const Token& tok, bool negative) {
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    if (tok.kind == TokenKind::Int) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw SyntaxError(ErrorCode::ParseError, tok.offset, "integer", tok.text, "integer out of range");
      }
      return Value(negative ? -v : v);
    }
    double v = 0;
    std::from_chars(first, last, v);
    return Value(negative ? -v : v);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Scope scope_;
};

}  // namespace

Query parse(std::string_view text) { return Parser(text).run(); }

namespace {

void collect_placeholders(const Expr& expr, std::set<std::string>& out) {
  if (expr.kind == ExprKind::Placeholder) out.insert(expr.name);
  for (const auto& arg : expr.args) collect_placeholders(arg, out);
}

}  // namespace

std::set<std::string> placeholders(const Query& query) {
  std::set<std::string> names;
  for (const auto& clause : query.clauses) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, WhereClause>) {
            collect_placeholders(c.condition, names);
          } else if constexpr (!std::is_same_v<T, MatchClause>) {
            for (const auto& item : c.items) collect_placeholders(item.expr, names);
          }
        },
        clause);
  }
  return names;
}

std::vector<std::string> return_columns(const Query& query) {
  std::vector<std::string> columns;
  if (query.clauses.empty()) return columns;
  if (auto ret = std::get_if<ReturnClause>(&query.clauses.back())) {
    for (const auto& item : ret->items) columns.push_back(item.name);
  }
  return columns;
}

}  // namespace agilelint::mql
