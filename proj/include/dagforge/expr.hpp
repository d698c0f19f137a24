#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dagforge/errors.hpp"
#include "dagforge/value.hpp"

namespace dagforge {

class FunctionRegistry;
class RandomStream;

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind { Ident, IntLit, FloatLit, StrLit, Keyword, Punct, Operator, Eof };

std::string_view token_kind_name(TokenKind kind) noexcept;

/// For StrLit tokens `text` holds the decoded contents; for everything else it
/// is the exact source slice.
struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string text;
  Span span;
};

/// Splits `src` into tokens, ending with an Eof token. Throws LexError.
std::vector<Token> tokenize(std::string_view src);

/// Words with syntactic meaning; never valid as node or function names.
bool is_reserved_word(std::string_view word) noexcept;

/// [A-Za-z_][A-Za-z0-9_]* and not a reserved word.
bool is_identifier(std::string_view text) noexcept;

// ---------------------------------------------------------------------------
// AST

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view op_symbol(UnaryOp op) noexcept;
std::string_view op_symbol(BinaryOp op) noexcept;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Lit {
  Value value;
};
struct Ref {
  std::string name;
};
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct IfElse {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct ListLit {
  std::vector<ExprPtr> elements;
};

struct Expr {
  std::variant<Lit, Ref, Call, Unary, Binary, IfElse, ListLit> node;
  Span span;
};

ExprPtr make_lit(Value v, Span span = {});
ExprPtr make_ref(std::string name, Span span = {});
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, Span span = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span span = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span span = {});
ExprPtr make_if(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch, Span span = {});
ExprPtr make_list(std::vector<ExprPtr> elements, Span span = {});

/// Recursive-descent parse of a full token stream. Throws ParseError.
ExprPtr parse_expr(const std::vector<Token>& tokens);

/// tokenize + parse_expr.
ExprPtr parse(std::string_view src);

/// Source text with the minimum parentheses needed to re-parse to the same
/// tree. Literal floats must be finite.
std::string pretty_print(const Expr& e);

/// Structural equality ignoring spans; literals compare with values_identical.
bool structurally_equal(const Expr& a, const Expr& b);

/// Referenced node names, deduplicated, in first-mention (pre-order) order.
std::vector<std::string> free_refs(const Expr& e);

struct CallSite {
  std::string callee;
  std::size_t arity;
  Span span;
};

/// Every call in the tree, pre-order.
std::vector<CallSite> call_sites(const Expr& e);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalEnv {
  std::unordered_map<std::string, Value> bindings;
  RandomStream* rng = nullptr;  // stochastic calls fail without one
  const FunctionRegistry* registry = nullptr;
};

/// Evaluates `e` in `env`. Throws EvalError.
Value eval(const Expr& e, EvalEnv& env);

/// Bool, or Int 0/1. Anything else throws CoercionError with `what` in the
/// message.
bool coerce_bool(const Value& v, std::string_view what);

}  // namespace dagforge
