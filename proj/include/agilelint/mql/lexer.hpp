#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace agilelint::mql {

enum class TokenKind {
  // keywords (case-sensitive, uppercase)
  Match, Where, With, Return, As, In, And, Or, Not, Distinct,
  // literals and names
  Ident, Int, Float, String, True, False, Placeholder,
  // punctuation
  LParen, RParen, LBracket, RBracket, Colon, Comma, Dot, Dash,
  Eq, Neq, Lt, Le, Gt, Ge,
  End,
};

struct Token {
  TokenKind kind;
  std::string text;  // identifier / literal payload; placeholder name without braces
  std::size_t offset;
};

std::string_view describe(TokenKind kind);

/// Splits query text into tokens. `//` starts a comment running to end of
/// line. Strings may be quoted with `"`, `'`, or typographic double quotes.
/// Throws SyntaxError(LexError) on stray characters or unterminated strings.
std::vector<Token> tokenize(std::string_view text);

}  // namespace agilelint::mql
