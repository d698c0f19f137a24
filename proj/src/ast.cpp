#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dagforge/expr.hpp"

namespace dagforge {

ExprPtr make_lit(Value v, Span span) {
  return std::make_shared<const Expr>(Expr{Lit{std::move(v)}, span});
}
ExprPtr make_ref(std::string name, Span span) {
  return std::make_shared<const Expr>(Expr{Ref{std::move(name)}, span});
}
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, Span span) {
  return std::make_shared<const Expr>(Expr{Call{std::move(callee), std::move(args)}, span});
}
ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span span) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand)}, span});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span span) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}, span});
}
ExprPtr make_if(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch, Span span) {
  return std::make_shared<const Expr>(
      Expr{IfElse{std::move(cond), std::move(then_branch), std::move(else_branch)}, span});
}
ExprPtr make_list(std::vector<ExprPtr> elements, Span span) {
  return std::make_shared<const Expr>(Expr{ListLit{std::move(elements)}, span});
}

std::string_view op_symbol(UnaryOp op) noexcept { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view op_symbol(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

namespace {

// Binding strength, loosest first.
enum Prec : int { kIf = 0, kOr, kAnd, kCmp, kAdd, kMul, kUnary, kAtom };

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMul;
    default: return kCmp;
  }
}

bool is_numeric_lit(const Expr& e) {
  const auto* lit = std::get_if<Lit>(&e.node);
  return lit && lit->value.is_numeric();
}

int prec_of(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IfElse>) return kIf;
        else if constexpr (std::is_same_v<T, Binary>) return binary_prec(n.op);
        else if constexpr (std::is_same_v<T, Unary>) return kUnary;
        else if constexpr (std::is_same_v<T, Lit>) {
          // A negative literal is read back through the unary rule.
          if (n.value.is_int() && n.value.as_int() < 0) return kUnary;
          if (n.value.is_float() && std::signbit(n.value.as_float())) return kUnary;
          return kAtom;
        } else return kAtom;
      },
      e.node);
}

void print_str_lit(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

void print(std::string& out, const Expr& e);

void print_child(std::string& out, const Expr& child, bool parens) {
  if (parens) out += '(';
  print(out, child);
  if (parens) out += ')';
}

void print_list(std::string& out, const std::vector<ExprPtr>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    print(out, *items[i]);
  }
}

void print_value(std::string& out, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Value::Kind::Int: out += std::to_string(v.as_int()); break;
    case Value::Kind::Float:
      if (!std::isfinite(v.as_float()))
        throw std::invalid_argument("non-finite float literal has no source form");
      out += format_float(v.as_float());
      break;
    case Value::Kind::Str: print_str_lit(out, v.as_str()); break;
    case Value::Kind::List: {
      out += '[';
      bool first = true;
      for (const auto& item : v.as_list()) {
        if (!first) out += ", ";
        first = false;
        print_value(out, item);
      }
      out += ']';
      break;
    }
    default:
      throw std::invalid_argument(std::string(type_name(v)) + " literal has no source form");
  }
}

void print(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Lit>) {
          print_value(out, n.value);
        } else if constexpr (std::is_same_v<T, Ref>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Call>) {
          out += n.callee;
          out += '(';
          print_list(out, n.args);
          out += ')';
        } else if constexpr (std::is_same_v<T, ListLit>) {
          out += '[';
          print_list(out, n.elements);
          out += ']';
        } else if constexpr (std::is_same_v<T, Unary>) {
          out += op_symbol(n.op);
          if (n.op == UnaryOp::Not) out += ' ';
          const bool parens = prec_of(*n.operand) < kUnary ||
                              (n.op == UnaryOp::Neg && is_numeric_lit(*n.operand));
          // "- -x" rather than "--x" keeps the text readable.
          if (!parens && n.op == UnaryOp::Neg && prec_of(*n.operand) == kUnary) out += ' ';
          print_child(out, *n.operand, parens);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = binary_prec(n.op);
          const int lp = prec_of(*n.lhs);
          const int rp = prec_of(*n.rhs);
          print_child(out, *n.lhs, lp < p || (p == kCmp && lp == kCmp));
          out += ' ';
          out += op_symbol(n.op);
          out += ' ';
          print_child(out, *n.rhs, rp <= p);
        } else if constexpr (std::is_same_v<T, IfElse>) {
          out += "if ";
          print(out, *n.cond);
          out += " then ";
          print(out, *n.then_branch);
          out += " else ";
          print(out, *n.else_branch);
        }
      },
      e.node);
}

bool lists_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(*a[i], *b[i])) return false;
  return true;
}

template <typename F>
void walk(const Expr& e, F&& visit) {
  visit(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) walk(*a, visit);
        } else if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& a : n.elements) walk(*a, visit);
        } else if constexpr (std::is_same_v<T, Unary>) {
          walk(*n.operand, visit);
        } else if constexpr (std::is_same_v<T, Binary>) {
          walk(*n.lhs, visit);
          walk(*n.rhs, visit);
        } else if constexpr (std::is_same_v<T, IfElse>) {
          walk(*n.cond, visit);
          walk(*n.then_branch, visit);
          walk(*n.else_branch, visit);
        }
      },
      e.node);
}

}  // namespace

std::string pretty_print(const Expr& e) {
  std::string out;
  print(out, e);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Lit>) {
          return values_identical(x.value, y.value);
        } else if constexpr (std::is_same_v<T, Ref>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Call>) {
          return x.callee == y.callee && lists_equal(x.args, y.args);
        } else if constexpr (std::is_same_v<T, ListLit>) {
          return lists_equal(x.elements, y.elements);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && structurally_equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                 structurally_equal(*x.rhs, *y.rhs);
        } else {
          return structurally_equal(*x.cond, *y.cond) &&
                 structurally_equal(*x.then_branch, *y.then_branch) &&
                 structurally_equal(*x.else_branch, *y.else_branch);
        }
      },
      a.node);
}

std::vector<std::string> free_refs(const Expr& e) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  walk(e, [&](const Expr& node) {
    if (const auto* r = std::get_if<Ref>(&node.node))
      if (seen.insert(r->name).second) out.push_back(r->name);
  });
  return out;
}

std::vector<CallSite> call_sites(const Expr& e) {
  std::vector<CallSite> out;
  walk(e, [&](const Expr& node) {
    if (const auto* c = std::get_if<Call>(&node.node))
      out.push_back({c->callee, c->args.size(), node.span});
  });
  return out;
}

}  // namespace dagforge
