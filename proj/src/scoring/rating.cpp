#include "agilelint/scoring/rating.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "agilelint/error.hpp"

namespace agilelint::scoring {

namespace {

struct FunctionInfo {
  std::string_view name;
  RatingFunction function;
  std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"max", RatingFunction::Max, 2}, {"min", RatingFunction::Min, 2}, {"pow", RatingFunction::Pow, 2},
    {"exp", RatingFunction::Exp, 1}, {"abs", RatingFunction::Abs, 1},
};

class RatingParser {
 public:
  explicit RatingParser(std::string_view text) : text_(text) {}

  RatingExpr run() {
    RatingExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < text_.size() ? std::string(text_.substr(pos_, 1)) : "end of input";
    throw SyntaxError(ErrorCode::ParseError, pos_, expected, found,
                      "expected " + expected + " but found '" + found + "' at offset " +
                          std::to_string(pos_));
  }

  static RatingExpr binary(RatingOp op, RatingExpr lhs, RatingExpr rhs, std::size_t offset) {
    RatingExpr e;
    e.op = op;
    e.offset = offset;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  RatingExpr expr() {
    RatingExpr lhs = term();
    while (true) {
      skip_space();
      std::size_t at = pos_;
      if (accept('+')) {
        lhs = binary(RatingOp::Add, std::move(lhs), term(), at);
      } else if (accept('-')) {
        lhs = binary(RatingOp::Subtract, std::move(lhs), term(), at);
      } else {
        return lhs;
      }
    }
  }

  RatingExpr term() {
    RatingExpr lhs = factor();
    while (true) {
      skip_space();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = binary(RatingOp::Multiply, std::move(lhs), factor(), at);
      } else if (accept('/')) {
        lhs = binary(RatingOp::Divide, std::move(lhs), factor(), at);
      } else {
        return lhs;
      }
    }
  }

  RatingExpr factor() {
    skip_space();
    RatingExpr e;
    e.offset = pos_;
    if (pos_ >= text_.size()) fail("expression");
    char c = text_[pos_];
    if (accept('-')) {
      e.op = RatingOp::Negate;
      e.args.push_back(factor());
      return e;
    }
    if (accept('(')) {
      RatingExpr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* first = text_.data() + pos_;
      const char* last = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(first, last, e.number);
      if (ec != std::errc()) fail("number");
      pos_ += std::size_t(ptr - first);
      e.op = RatingOp::Number;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(text_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') return call(name, start);
      e.op = RatingOp::Binding;
      e.name = std::move(name);
      return e;
    }
    fail("expression");
  }

  RatingExpr call(const std::string& name, std::size_t offset) {
    const FunctionInfo* info = nullptr;
    for (const auto& f : kFunctions) {
      if (f.name == name) info = &f;
    }
    if (!info) {
      throw SyntaxError(ErrorCode::UnknownFunction, offset, "max, min, pow, exp or abs", name,
                        "unknown function '" + name + "' at offset " + std::to_string(offset));
    }
    expect('(');
    RatingExpr e;
    e.op = RatingOp::Call;
    e.function = info->function;
    e.offset = offset;
    if (!accept(')')) {
      e.args.push_back(expr());
      while (accept(',')) e.args.push_back(expr());
      expect(')');
    }
    if (e.args.size() != info->arity) {
      throw SyntaxError(ErrorCode::ArityError, offset, std::to_string(info->arity) + " arguments",
                        std::to_string(e.args.size()) + " arguments",
                        name + "() takes " + std::to_string(info->arity) + " arguments, got " +
                            std::to_string(e.args.size()));
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double finite(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateInput, "non-finite intermediate value");
  return v;
}

double eval(const RatingExpr& e, const ScoreBindings& bindings) {
  switch (e.op) {
    case RatingOp::Number:
      return e.number;
    case RatingOp::Binding: {
      auto it = bindings.find(e.name);
      if (it == bindings.end()) throw Error(ErrorCode::UnknownBinding, "unknown binding '" + e.name + "'");
      return finite(it->second);
    }
    case RatingOp::Negate:
      return -eval(e.args[0], bindings);
    case RatingOp::Add:
      return finite(eval(e.args[0], bindings) + eval(e.args[1], bindings));
    case RatingOp::Subtract:
      return finite(eval(e.args[0], bindings) - eval(e.args[1], bindings));
    case RatingOp::Multiply:
      return finite(eval(e.args[0], bindings) * eval(e.args[1], bindings));
    case RatingOp::Divide: {
      double numerator = eval(e.args[0], bindings);
      double denominator = eval(e.args[1], bindings);
      if (denominator == 0) throw Error(ErrorCode::DegenerateInput, "division by zero");
      return finite(numerator / denominator);
    }
    case RatingOp::Call: {
      double a = eval(e.args[0], bindings);
      switch (e.function) {
        case RatingFunction::Max: return std::max(a, eval(e.args[1], bindings));
        case RatingFunction::Min: return std::min(a, eval(e.args[1], bindings));
        case RatingFunction::Pow: return finite(std::pow(a, eval(e.args[1], bindings)));
        case RatingFunction::Exp: return finite(std::exp(a));
        case RatingFunction::Abs: return std::abs(a);
      }
    }
  }
  return 0;
}

void collect_names(const RatingExpr& e, std::set<std::string>& out) {
  if (e.op == RatingOp::Binding) out.insert(e.name);
  for (const auto& arg : e.args) collect_names(arg, out);
}

}  // namespace

RatingExpr parse_rating(std::string_view text) { return RatingParser(text).run(); }

double eval_rating(const RatingExpr& expr, const ScoreBindings& bindings) {
  return std::clamp(eval(expr, bindings), 0.0, 100.0);
}

std::set<std::string> binding_names(const RatingExpr& expr) {
  std::set<std::string> names;
  collect_names(expr, names);
  return names;
}

}  // namespace agilelint::scoring
