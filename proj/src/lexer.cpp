#include <array>
#include <cctype>
#include <charconv>

#include "dagforge/expr.hpp"

namespace dagforge {

std::string_view token_kind_name(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::FloatLit: return "float literal";
    case TokenKind::StrLit: return "string literal";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::Operator: return "operator";
    case TokenKind::Eof: return "end of input";
  }
  return "token";
}

namespace {

constexpr std::array<std::string_view, 5> kKeywords = {"if", "then", "else", "true", "false"};
constexpr std::array<std::string_view, 3> kWordOperators = {"and", "or", "not"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& words, std::string_view w) {
  for (auto k : words)
    if (k == w) return true;
  return false;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_whitespace();
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::Eof, "", {pos_, pos_}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_whitespace() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  Token make(TokenKind kind, std::size_t start) const {
    return {kind, std::string(src_.substr(start, pos_ - start)), {start, pos_}};
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      const auto word = src_.substr(start, pos_ - start);
      if (contains(kKeywords, word)) return make(TokenKind::Keyword, start);
      if (contains(kWordOperators, word)) return make(TokenKind::Operator, start);
      return make(TokenKind::Ident, start);
    }
    if (digit(c)) return number(start);
    if (c == '"') return string_literal(start);
    switch (c) {
      case '(': case ')': case '[': case ']': case ',':
        ++pos_;
        return make(TokenKind::Punct, start);
      case '+': case '-': case '*': case '/': case '%':
        ++pos_;
        return make(TokenKind::Operator, start);
      case '<': case '>':
        ++pos_;
        if (peek() == '=') ++pos_;
        return make(TokenKind::Operator, start);
      case '=': case '!':
        if (peek(1) == '=') {
          pos_ += 2;
          return make(TokenKind::Operator, start);
        }
        throw LexError({start, start + 1}, std::string("unexpected '") + c + "' (did you mean '" +
                                               c + "='?)");
      default:
        break;
    }
    throw LexError({start, start + 1}, "unexpected character");
  }

  Token number(std::size_t start) {
    bool is_float = false;
    while (digit(peek())) ++pos_;
    if (peek() == '.') {
      is_float = true;
      ++pos_;
      if (!digit(peek())) throw LexError({start, pos_}, "expected digit after '.'");
      while (digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      is_float = true;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!digit(peek())) throw LexError({start, pos_}, "expected digit in exponent");
      while (digit(peek())) ++pos_;
    }
    Token tok = make(is_float ? TokenKind::FloatLit : TokenKind::IntLit, start);
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    if (is_float) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(first, last, x);
      if (ec != std::errc() || ptr != last) throw LexError(tok.span, "float literal out of range");
    } else {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(first, last, i);
      if (ec != std::errc() || ptr != last)
        throw LexError(tok.span, "integer literal outside 64-bit signed range");
    }
    return tok;
  }

  Token string_literal(std::size_t start) {
    ++pos_;
    std::string decoded;
    while (pos_ < src_.size()) {
      const char c = src_[pos_++];
      if (c == '"') return {TokenKind::StrLit, std::move(decoded), {start, pos_}};
      if (c == '\\') {
        const char e = peek();
        if (e != '"' && e != '\\')
          throw LexError({pos_ - 1, pos_ + (pos_ < src_.size() ? 1 : 0)},
                         "only \\\" and \\\\ escapes are supported");
        decoded += e;
        ++pos_;
        continue;
      }
      decoded += c;
    }
    throw LexError({start, src_.size()}, "unterminated string literal");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

bool is_reserved_word(std::string_view word) noexcept {
  return contains(kKeywords, word) || contains(kWordOperators, word);
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty() || !ident_start(text.front())) return false;
  for (char c : text)
    if (!ident_char(c)) return false;
  return !is_reserved_word(text);
}

}  // namespace dagforge
