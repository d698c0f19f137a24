#include <cmath>

#include "dagforge/expr.hpp"
#include "dagforge/registry.hpp"

namespace dagforge {

bool coerce_bool(const Value& v, std::string_view what) {
  if (v.is_bool()) return v.as_bool();
  if (v.is_int() && (v.as_int() == 0 || v.as_int() == 1)) return v.as_int() == 1;
  std::string shown = v.is_int() ? "int " + std::to_string(v.as_int()) : std::string(type_name(v));
  throw CoercionError(std::string(what) + " must be a bool or an int 0/1, got " + shown);
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(EvalEnv& env) : env_(env) {}

  Value operator()(const Expr& e) {
    return std::visit([&](const auto& n) { return eval_node(n, e.span); }, e.node);
  }

 private:
  Value eval_node(const Lit& n, Span) { return n.value; }

  Value eval_node(const Ref& n, Span span) {
    auto it = env_.bindings.find(n.name);
    if (it == env_.bindings.end()) throw EvalError(span, "unbound reference '" + n.name + "'");
    return it->second;
  }

  Value eval_node(const ListLit& n, Span) {
    List items;
    items.reserve(n.elements.size());
    for (const auto& e : n.elements) items.push_back((*this)(*e));
    return Value::list(std::move(items));
  }

  Value eval_node(const Call& n, Span span) {
    if (!env_.registry) throw EvalError(span, "no function registry available");
    const FunctionEntry* fn = env_.registry->find(n.callee);
    if (!fn) throw EvalError(span, "unknown function '" + n.callee + "'");
    if (!fn->arity.accepts(n.args.size()))
      throw EvalError(span, "'" + n.callee + "' takes " + fn->arity.describe() +
                                " argument(s), got " + std::to_string(n.args.size()));
    if (fn->stochastic && !env_.rng)
      throw EvalError(span, "'" + n.callee + "' is stochastic but no random stream is bound");
    std::vector<Value> args;
    args.reserve(n.args.size());
    for (const auto& a : n.args) args.push_back((*this)(*a));
    try {
      return fn->impl(args, env_.rng);
    } catch (const EvalError&) {
      throw;
    } catch (const std::exception& ex) {
      throw EvalError(span, n.callee + ": " + ex.what());
    }
  }

  bool truth(const Value& v, Span span, std::string_view what) {
    try {
      return coerce_bool(v, what);
    } catch (const CoercionError& ex) {
      throw EvalError(span, ex.what());
    }
  }

  Value eval_node(const Unary& n, Span span) {
    const Value v = (*this)(*n.operand);
    if (n.op == UnaryOp::Not) return Value::boolean(!truth(v, span, "operand of 'not'"));
    if (v.is_int()) {
      if (v.as_int() == std::numeric_limits<std::int64_t>::min())
        throw EvalError(span, "integer overflow");
      return Value::integer(-v.as_int());
    }
    if (v.is_float()) return Value::real(-v.as_float());
    throw EvalError(span, "cannot negate " + std::string(type_name(v)));
  }

  Value eval_node(const IfElse& n, Span span) {
    const Value c = (*this)(*n.cond);
    return truth(c, span, "if condition") ? (*this)(*n.then_branch) : (*this)(*n.else_branch);
  }

  Value eval_node(const Binary& n, Span span) {
    if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
      const bool lhs = truth((*this)(*n.lhs), span, "operand of '" + std::string(op_symbol(n.op)) + "'");
      if (n.op == BinaryOp::And && !lhs) return Value::boolean(false);
      if (n.op == BinaryOp::Or && lhs) return Value::boolean(true);
      return Value::boolean(truth((*this)(*n.rhs), span, "operand of '" + std::string(op_symbol(n.op)) + "'"));
    }
    const Value a = (*this)(*n.lhs);
    const Value b = (*this)(*n.rhs);
    switch (n.op) {
      case BinaryOp::Eq: return Value::boolean(values_equal(a, b));
      case BinaryOp::Ne: return Value::boolean(!values_equal(a, b));
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: return compare(n.op, a, b, span);
      default: return arithmetic(n.op, a, b, span);
    }
  }

  Value compare(BinaryOp op, const Value& a, const Value& b, Span span) {
    int order = 0;
    if (a.is_int() && b.is_int()) {
      order = a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int() ? 1 : 0;
    } else if (a.is_numeric() && b.is_numeric()) {
      const double x = a.to_double();
      const double y = b.to_double();
      if (std::isnan(x) || std::isnan(y)) return Value::boolean(false);
      order = x < y ? -1 : x > y ? 1 : 0;
    } else if (a.is_str() && b.is_str()) {
      const int c = a.as_str().compare(b.as_str());
      order = c < 0 ? -1 : c > 0 ? 1 : 0;
    } else {
      throw EvalError(span, "cannot order " + std::string(type_name(a)) + " and " +
                                std::string(type_name(b)));
    }
    switch (op) {
      case BinaryOp::Lt: return Value::boolean(order < 0);
      case BinaryOp::Le: return Value::boolean(order <= 0);
      case BinaryOp::Gt: return Value::boolean(order > 0);
      default: return Value::boolean(order >= 0);
    }
  }

  Value arithmetic(BinaryOp op, const Value& a, const Value& b, Span span) {
    if (op == BinaryOp::Add && a.is_str() && b.is_str()) return Value::str(a.as_str() + b.as_str());
    if (op == BinaryOp::Add && a.is_list() && b.is_list()) {
      List joined = a.as_list();
      joined.insert(joined.end(), b.as_list().begin(), b.as_list().end());
      return Value::list(std::move(joined));
    }
    if (!a.is_numeric() || !b.is_numeric())
      throw EvalError(span, "operator '" + std::string(op_symbol(op)) + "' not defined for " +
                                std::string(type_name(a)) + " and " + std::string(type_name(b)));
    if (op == BinaryOp::Div) {
      const double y = b.to_double();
      if (y == 0.0) throw EvalError(span, "division by zero");
      return Value::real(a.to_double() / y);
    }
    if (a.is_int() && b.is_int()) {
      const std::int64_t x = a.as_int();
      const std::int64_t y = b.as_int();
      std::int64_t r = 0;
      bool overflow = false;
      switch (op) {
        case BinaryOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
        case BinaryOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
        case BinaryOp::Mul: overflow = __builtin_mul_overflow(x, y, &r); break;
        default: {
          if (y == 0) throw EvalError(span, "modulo by zero");
          if (y == -1) return Value::integer(0);
          r = x % y;
          if (r != 0 && ((r < 0) != (y < 0))) r += y;  // result takes the divisor's sign
        }
      }
      if (overflow) throw EvalError(span, "integer overflow");
      return Value::integer(r);
    }
    const double x = a.to_double();
    const double y = b.to_double();
    switch (op) {
      case BinaryOp::Add: return Value::real(x + y);
      case BinaryOp::Sub: return Value::real(x - y);
      case BinaryOp::Mul: return Value::real(x * y);
      default: {
        if (y == 0.0) throw EvalError(span, "modulo by zero");
        return Value::real(x - y * std::floor(x / y));
      }
    }
  }

  EvalEnv& env_;
};

}  // namespace

Value eval(const Expr& e, EvalEnv& env) { return Evaluator(env)(e); }

}  // namespace dagforge
