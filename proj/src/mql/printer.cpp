#include <variant>

#include "agilelint/mql/parser.hpp"

namespace agilelint::mql {

namespace {

// Binding strength, loosest first.
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Not: return 3;
    case ExprKind::Compare:
    case ExprKind::In: return 4;
    default: return 5;
  }
}

void print_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

void print_literal(std::string& out, const Value& v) {
  if (v.is_null()) {
    out += "null";
  } else if (auto b = v.get_if<bool>()) {
    out += *b ? "true" : "false";
  } else if (auto i = v.get_if<std::int64_t>()) {
    out += std::to_string(*i);
  } else if (auto d = v.get_if<double>()) {
    out += format_number(*d);
  } else if (auto s = v.get_if<std::string>()) {
    print_string(out, *s);
  } else if (auto t = v.get_if<Timestamp>()) {
    print_string(out, format_iso8601(*t));
  } else if (auto n = v.get_if<NodeRef>()) {
    out += "node(" + std::to_string(n->id) + ")";
  } else if (auto l = v.get_if<List>()) {
    out += '[';
    for (std::size_t i = 0; i < l->size(); ++i) {
      if (i) out += ", ";
      print_literal(out, (*l)[i]);
    }
    out += ']';
  }
}

void print(std::string& out, const Expr& e);

void print_operand(std::string& out, const Expr& operand, int min_precedence) {
  bool wrap = precedence(operand) < min_precedence;
  if (wrap) out += '(';
  print(out, operand);
  if (wrap) out += ')';
}

void print(std::string& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Literal:
      print_literal(out, e.literal);
      break;
    case ExprKind::List:
      out += '[';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print(out, e.args[i]);
      }
      out += ']';
      break;
    case ExprKind::Variable:
      out += e.name;
      break;
    case ExprKind::Property:
      out += e.name + "." + e.key;
      break;
    case ExprKind::Placeholder:
      out += e.quoted ? "\"{" + e.name + "}\"" : "{" + e.name + "}";
      break;
    case ExprKind::Compare:
    case ExprKind::In:
      print_operand(out, e.args[0], 5);
      out += ' ';
      out += e.kind == ExprKind::In ? std::string("IN") : std::string(to_string(e.op));
      out += ' ';
      print_operand(out, e.args[1], 5);
      break;
    case ExprKind::And:
    case ExprKind::Or: {
      int p = precedence(e);
      print_operand(out, e.args[0], p);
      out += e.kind == ExprKind::And ? " AND " : " OR ";
      print_operand(out, e.args[1], p + 1);  // right operand of the same operator needs parens
      break;
    }
    case ExprKind::Not:
      out += "NOT ";
      print_operand(out, e.args[0], 3);
      break;
    case ExprKind::Call:
      out += to_string(e.fn);
      out += '(';
      if (e.distinct) out += "DISTINCT ";
      print(out, e.args[0]);
      out += ')';
      break;
  }
}

void print_items(std::string& out, const std::vector<Item>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    print(out, items[i].expr);
    if (items[i].aliased) out += " AS " + items[i].name;
  }
}

void print_pattern(std::string& out, const Pattern& p) {
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) {
      const auto& edge = p.edges[i - 1];
      out += edge.direction == EdgeDirection::left ? "<-[" : "-[";
      if (edge.type) out += ":" + std::string(to_string(*edge.type));
      out += edge.direction == EdgeDirection::right ? "]->" : "]-";
    }
    const auto& node = p.nodes[i];
    out += '(';
    if (node.variable) out += *node.variable;
    if (node.label) out += ":" + std::string(to_string(*node.label));
    out += ')';
  }
}

}  // namespace

std::string to_text(const Expr& expr) {
  std::string out;
  print(out, expr);
  return out;
}

std::string to_text(const Query& query) {
  std::string out;
  for (const auto& clause : query.clauses) {
    if (!out.empty()) out += ' ';
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, MatchClause>) {
            out += "MATCH ";
            for (std::size_t i = 0; i < c.patterns.size(); ++i) {
              if (i) out += ", ";
              print_pattern(out, c.patterns[i]);
            }
          } else if constexpr (std::is_same_v<T, WhereClause>) {
            out += "WHERE ";
            print(out, c.condition);
          } else if constexpr (std::is_same_v<T, WithClause>) {
            out += "WITH ";
            print_items(out, c.items);
          } else {
            out += "RETURN ";
            print_items(out, c.items);
          }
        },
        clause);
  }
  return out;
}

}  // namespace agilelint::mql
