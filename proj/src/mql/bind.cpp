#include <set>
#include <variant>

#include "agilelint/error.hpp"
#include "agilelint/mql/evaluator.hpp"

namespace agilelint::mql {

namespace {

enum class Position { Scalar, InList, InRhs };

class Binder {
 public:
  explicit Binder(const PlaceholderBindings& bindings) : bindings_(bindings) {}

  void bind(Expr& expr, Position position = Position::Scalar) {
    switch (expr.kind) {
      case ExprKind::Placeholder:
        replace(expr, position);
        return;
      case ExprKind::List: {
        std::vector<Expr> elements;
        for (auto& element : expr.args) {
          bind(element, Position::InList);
          if (element.kind == ExprKind::Literal && spliced_.contains(&element)) {
            for (auto& v : std::get<List>(element.literal.data)) {
              Expr lit;
              lit.kind = ExprKind::Literal;
              lit.offset = element.offset;
              lit.literal = std::move(v);
              elements.push_back(std::move(lit));
            }
          } else {
            elements.push_back(std::move(element));
          }
        }
        expr.args = std::move(elements);
        return;
      }
      case ExprKind::In:
        bind(expr.args[0]);
        bind(expr.args[1], Position::InRhs);
        return;
      default:
        for (auto& arg : expr.args) bind(arg);
    }
  }

 private:
  void replace(Expr& expr, Position position) {
    auto it = bindings_.find(expr.name);
    if (it == bindings_.end()) {
      throw Error(ErrorCode::UnboundPlaceholder, "placeholder {" + expr.name + "} is not bound");
    }
    const Value& value = it->second;
    bool list = value.is_list();
    if ((position == Position::InRhs && !list) || (position == Position::Scalar && list) ||
        (expr.quoted && list)) {
      throw Error(ErrorCode::PlaceholderTypeMismatch,
                  "placeholder {" + expr.name + "} is bound to a " + (list ? "list" : "scalar") +
                      " where a " + (list ? "scalar" : "list") + " is required");
    }
    expr.kind = ExprKind::Literal;
    expr.literal = value;
    expr.quoted = false;
    expr.name.clear();
    if (position == Position::InList && list) spliced_.insert(&expr);
  }

  const PlaceholderBindings& bindings_;
  std::set<const Expr*> spliced_;
};

}  // namespace

Query bind_placeholders(const Query& query, const PlaceholderBindings& bindings) {
  Query bound = query;
  Binder binder(bindings);
  for (auto& clause : bound.clauses) {
    std::visit(
        [&](auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, WhereClause>) {
            binder.bind(c.condition);
          } else if constexpr (!std::is_same_v<T, MatchClause>) {
            for (auto& item : c.items) binder.bind(item.expr);
          }
        },
        clause);
  }
  return bound;
}

}  // namespace agilelint::mql
