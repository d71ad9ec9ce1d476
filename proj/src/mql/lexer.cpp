#include "agilelint/mql/lexer.hpp"

#include <array>
#include <cctype>
#include <utility>

#include "agilelint/error.hpp"

namespace agilelint::mql {

namespace {

constexpr std::string_view kOpenQuote = "\xE2\x80\x9C";   // U+201C
constexpr std::string_view kCloseQuote = "\xE2\x80\x9D";  // U+201D

constexpr std::array<std::pair<std::string_view, TokenKind>, 12> kKeywords = {{
    {"MATCH", TokenKind::Match},
    {"WHERE", TokenKind::Where},
    {"WITH", TokenKind::With},
    {"RETURN", TokenKind::Return},
    {"AS", TokenKind::As},
    {"IN", TokenKind::In},
    {"AND", TokenKind::And},
    {"OR", TokenKind::Or},
    {"NOT", TokenKind::Not},
    {"DISTINCT", TokenKind::Distinct},
    {"true", TokenKind::True},
    {"false", TokenKind::False},
}};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

[[noreturn]] void lex_error(std::string_view text, std::size_t offset, const std::string& what) {
  std::string snippet(text.substr(offset, 12));
  throw SyntaxError(ErrorCode::LexError, offset, "", snippet,
                    what + " at offset " + std::to_string(offset) + " near '" + snippet + "'");
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      tokens.push_back(next());
    }
    return tokens;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token next() {
    std::size_t start = pos_;
    char c = text_[pos_];
    if (ident_start(c)) {
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      std::string word(text_.substr(start, pos_ - start));
      for (const auto& [keyword, kind] : kKeywords) {
        if (keyword == word) return {kind, word, start};
      }
      if (word == "TRUE") return {TokenKind::True, word, start};
      if (word == "FALSE") return {TokenKind::False, word, start};
      return {TokenKind::Ident, word, start};
    }
    if (digit(c)) return number(start);
    if (c == '"' || c == '\'') return quoted(start, std::string_view(&text_[pos_], 1), 1);
    if (text_.substr(pos_, kOpenQuote.size()) == kOpenQuote) {
      return quoted(start, kCloseQuote, kOpenQuote.size());
    }
    if (c == '{') return placeholder(start);

    ++pos_;
    switch (c) {
      case '(': return {TokenKind::LParen, "(", start};
      case ')': return {TokenKind::RParen, ")", start};
      case '[': return {TokenKind::LBracket, "[", start};
      case ']': return {TokenKind::RBracket, "]", start};
      case ':': return {TokenKind::Colon, ":", start};
      case ',': return {TokenKind::Comma, ",", start};
      case '.': return {TokenKind::Dot, ".", start};
      case '-': return {TokenKind::Dash, "-", start};
      case '=': return {TokenKind::Eq, "=", start};
      case '>':
        if (peek('=')) return {TokenKind::Ge, ">=", start};
        return {TokenKind::Gt, ">", start};
      case '<':
        if (peek('=')) return {TokenKind::Le, "<=", start};
        if (peek('>')) return {TokenKind::Neq, "<>", start};
        return {TokenKind::Lt, "<", start};
      default:
        lex_error(text_, start, "unexpected character");
    }
  }

  bool peek(char expected) {
    if (pos_ < text_.size() && text_[pos_] == expected) {
      ++pos_;
      return true;
    }
    return false;
  }

  Token number(std::size_t start) {
    bool is_float = false;
    while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
      is_float = true;
      ++pos_;
      while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && digit(text_[pos_])) {
        is_float = true;
        while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    if (pos_ < text_.size() && ident_char(text_[pos_])) {
      lex_error(text_, pos_, "malformed number");
    }
    return {is_float ? TokenKind::Float : TokenKind::Int,
            std::string(text_.substr(start, pos_ - start)), start};
  }

  Token quoted(std::size_t start, std::string_view close, std::size_t open_len) {
    pos_ += open_len;
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) lex_error(text_, start, "unterminated string");
      if (text_.substr(pos_, close.size()) == close) {
        pos_ += close.size();
        return {TokenKind::String, value, start};
      }
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) lex_error(text_, start, "unterminated string");
        char esc = text_[pos_++];
        switch (esc) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: value += esc; break;
        }
      } else {
        value += c;
      }
    }
  }

  Token placeholder(std::size_t start) {
    ++pos_;
    skip_space();
    std::size_t name_start = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) lex_error(text_, start, "malformed placeholder");
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(name_start, pos_ - name_start));
    skip_space();
    if (!peek('}')) lex_error(text_, start, "malformed placeholder");
    return {TokenKind::Placeholder, name, start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Match: return "MATCH";
    case TokenKind::Where: return "WHERE";
    case TokenKind::With: return "WITH";
    case TokenKind::Return: return "RETURN";
    case TokenKind::As: return "AS";
    case TokenKind::In: return "IN";
    case TokenKind::And: return "AND";
    case TokenKind::Or: return "OR";
    case TokenKind::Not: return "NOT";
    case TokenKind::Distinct: return "DISTINCT";
    case TokenKind::Ident: return "identifier";
    case TokenKind::Int: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::String: return "string";
    case TokenKind::True: return "true";
    case TokenKind::False: return "false";
    case TokenKind::Placeholder: return "placeholder";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Dash: return "'-'";
    case TokenKind::Eq: return "'='";
    case TokenKind::Neq: return "'<>'";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace agilelint::mql
