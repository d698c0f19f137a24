#include <algorithm>
#include <charconv>
#include <optional>

#include "dagforge/expr.hpp"

namespace dagforge {

namespace {

constexpr int kMaxDepth = 200;

Span join(Span a, Span b) { return {a.begin, b.end}; }

std::string describe(const Token& t) {
  if (t.kind == TokenKind::Eof) return "end of input";
  if (t.kind == TokenKind::StrLit) return "string literal";
  return "'" + t.text + "'";
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::Eof)
      throw ParseError({}, {"token stream terminated by end of input"}, "unterminated stream");
  }

  ExprPtr run() {
    auto e = expr();
    if (peek().kind != TokenKind::Eof) fail({"end of input", "operator"});
    return e;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth)
        throw ParseError(parser.peek().span, {"shallower nesting"}, "nesting deeper than 200");
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  const Token& peek(std::size_t ahead = 0) const {
    const auto i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  bool at(TokenKind kind, std::string_view text) const {
    return peek().kind == kind && peek().text == text;
  }

  bool at_punct(std::string_view p) const { return at(TokenKind::Punct, p); }
  bool at_op(std::string_view op) const { return at(TokenKind::Operator, op); }
  bool at_keyword(std::string_view kw) const { return at(TokenKind::Keyword, kw); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().span, std::move(expected), describe(peek()));
  }

  const Token& expect(TokenKind kind, std::string_view text) {
    if (!at(kind, text)) fail({"'" + std::string(text) + "'"});
    return advance();
  }

  ExprPtr expr() {
    DepthGuard guard(*this);
    if (at_keyword("if")) {
      const Span start = advance().span;
      auto cond = expr();
      expect(TokenKind::Keyword, "then");
      auto then_branch = expr();
      expect(TokenKind::Keyword, "else");
      auto else_branch = expr();
      const Span span = join(start, else_branch->span);
      return make_if(std::move(cond), std::move(then_branch), std::move(else_branch), span);
    }
    return or_expr();
  }

  ExprPtr or_expr() {
    auto lhs = and_expr();
    while (at_op("or")) {
      advance();
      auto rhs = and_expr();
      const Span span = join(lhs->span, rhs->span);
      lhs = make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    auto lhs = comparison();
    while (at_op("and")) {
      advance();
      auto rhs = comparison();
      const Span span = join(lhs->span, rhs->span);
      lhs = make_binary(BinaryOp::And, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  std::optional<BinaryOp> comparison_op() const {
    if (peek().kind != TokenKind::Operator) return std::nullopt;
    const auto& t = peek().text;
    if (t == "==") return BinaryOp::Eq;
    if (t == "!=") return BinaryOp::Ne;
    if (t == "<") return BinaryOp::Lt;
    if (t == "<=") return BinaryOp::Le;
    if (t == ">") return BinaryOp::Gt;
    if (t == ">=") return BinaryOp::Ge;
    return std::nullopt;
  }

  ExprPtr comparison() {
    auto lhs = additive();
    if (auto op = comparison_op()) {
      advance();
      auto rhs = additive();
      const Span span = join(lhs->span, rhs->span);
      lhs = make_binary(*op, std::move(lhs), std::move(rhs), span);
      // Comparisons do not chain.
      if (comparison_op()) fail({"'and'", "'or'", "end of expression"});
    }
    return lhs;
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (at_op("+") || at_op("-")) {
      const BinaryOp op = advance().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      auto rhs = multiplicative();
      const Span span = join(lhs->span, rhs->span);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = unary();
    while (at_op("*") || at_op("/") || at_op("%")) {
      const auto& text = advance().text;
      const BinaryOp op = text == "*" ? BinaryOp::Mul : text == "/" ? BinaryOp::Div : BinaryOp::Mod;
      auto rhs = unary();
      const Span span = join(lhs->span, rhs->span);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), span);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_op("-")) {
      DepthGuard guard(*this);
      const Span start = advance().span;
      // A minus directly applied to a numeric literal is part of the literal.
      if (peek().kind == TokenKind::IntLit || peek().kind == TokenKind::FloatLit) {
        const Token& lit = advance();
        return numeric_literal(lit, true, join(start, lit.span));
      }
      auto operand = unary();
      const Span span = join(start, operand->span);
      return make_unary(UnaryOp::Neg, std::move(operand), span);
    }
    if (at_op("not")) {
      DepthGuard guard(*this);
      const Span start = advance().span;
      auto operand = unary();
      const Span span = join(start, operand->span);
      return make_unary(UnaryOp::Not, std::move(operand), span);
    }
    return atom();
  }

  ExprPtr numeric_literal(const Token& tok, bool negate, Span span) const {
    const std::string text = (negate ? "-" : "") + tok.text;
    const char* first = text.data();
    const char* last = first + text.size();
    if (tok.kind == TokenKind::IntLit) {
      std::int64_t i = 0;
      std::from_chars(first, last, i);
      return make_lit(Value::integer(i), span);
    }
    double x = 0;
    std::from_chars(first, last, x);
    return make_lit(Value::real(x), span);
  }

  std::vector<ExprPtr> expr_list(std::string_view close) {
    std::vector<ExprPtr> items;
    if (at_punct(close)) return items;
    items.push_back(expr());
    while (at_punct(",")) {
      advance();
      items.push_back(expr());
    }
    if (!at_punct(close)) fail({"','", "'" + std::string(close) + "'"});
    return items;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::IntLit:
      case TokenKind::FloatLit: {
        const Token& lit = advance();
        return numeric_literal(lit, false, lit.span);
      }
      case TokenKind::StrLit: {
        const Token& lit = advance();
        return make_lit(Value::str(lit.text), lit.span);
      }
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") {
          const Token& lit = advance();
          return make_lit(Value::boolean(lit.text == "true"), lit.span);
        }
        break;
      case TokenKind::Ident: {
        const Token& name = advance();
        if (!at_punct("(")) return make_ref(name.text, name.span);
        advance();
        auto args = expr_list(")");
        const Span close = advance().span;
        return make_call(name.text, std::move(args), join(name.span, close));
      }
      case TokenKind::Punct:
        if (t.text == "(") {
          advance();
          auto inner = expr();
          expect(TokenKind::Punct, ")");
          return inner;
        }
        if (t.text == "[") {
          const Span open = advance().span;
          auto items = expr_list("]");
          const Span close = advance().span;
          return make_list(std::move(items), join(open, close));
        }
        break;
      default:
        break;
    }
    fail({"literal", "identifier", "'('", "'['", "'-'", "'not'", "'if'"});
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ExprPtr parse_expr(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ExprPtr parse(std::string_view src) { return parse_expr(tokenize(src)); }

}  // namespace dagforge
