#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace agilelint::scoring {

enum class RatingOp { Number, Binding, Negate, Add, Subtract, Multiply, Divide, Call };
enum class RatingFunction { Max, Min, Pow, Exp, Abs };

/// Arithmetic rating expression.
struct RatingExpr {
  RatingOp op = RatingOp::Number;
  double number = 0;
  std::string name;  // Binding
  RatingFunction function = RatingFunction::Max;
  std::vector<RatingExpr> args;
  std::size_t offset = 0;
};

using ScoreBindings = std::map<std::string, double, std::less<>>;

/// expr   := term (("+"|"-") term)*
/// term   := factor (("*"|"/") factor)*
/// factor := number | ident | func "(" expr ("," expr)* ")" | "(" expr ")" | "-" factor
///
/// Throws SyntaxError with ParseError, UnknownFunction or ArityError.
RatingExpr parse_rating(std::string_view text);

/// Evaluates and clamps to [0, 100]. Division by zero or any non-finite
/// intermediate throws Error(DegenerateInput); a missing name throws
/// Error(UnknownBinding).
double eval_rating(const RatingExpr& expr, const ScoreBindings& bindings);

/// Every binding name the expression reads.
std::set<std::string> binding_names(const RatingExpr& expr);

}  // namespace agilelint::scoring
