#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dagforge {

class Value;

using List = std::vector<Value>;

/// Dense row-major tensor of 64-bit reals. Every shape entry is >= 1 and
/// data.size() equals the product of the shape.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  std::size_t rank() const noexcept { return shape.size(); }
};

/// Throws DomainError unless `shape` is non-empty, every entry is positive and
/// `data` has exactly the implied number of elements.
void check_tensor(const Tensor& t);

/// Dynamic value flowing along graph edges. Immutable; copies share storage
/// for lists and tensors.
class Value {
 public:
  enum class Kind { Bool, Int, Float, Str, List, Tensor, Missing };

  Value() = default;  // Missing

  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value real(double x);
  static Value str(std::string s);
  static Value list(List items);
  static Value tensor(Tensor t);
  static Value missing() { return Value(); }

  Kind kind() const noexcept;

  bool is_bool() const noexcept { return kind() == Kind::Bool; }
  bool is_int() const noexcept { return kind() == Kind::Int; }
  bool is_float() const noexcept { return kind() == Kind::Float; }
  bool is_str() const noexcept { return kind() == Kind::Str; }
  bool is_list() const noexcept { return kind() == Kind::List; }
  bool is_tensor() const noexcept { return kind() == Kind::Tensor; }
  bool is_missing() const noexcept { return kind() == Kind::Missing; }
  bool is_numeric() const noexcept { return is_int() || is_float(); }

  // Accessors throw DomainError on kind mismatch.
  bool as_bool() const;
  std::int64_t as_int() const;
  double as_float() const;
  const std::string& as_str() const;
  const List& as_list() const;
  const Tensor& as_tensor() const;

  /// Int or Float widened to double.
  double to_double() const;

 private:
  struct MissingTag {};
  using Storage = std::variant<MissingTag, bool, std::int64_t, double, std::string,
                               std::shared_ptr<const List>, std::shared_ptr<const Tensor>>;

  explicit Value(Storage s) : data_(std::move(s)) {}

  Storage data_;
};

std::string_view kind_name(Value::Kind kind) noexcept;

/// One of "bool", "int", "float", "str", "list", "tensor", "missing".
std::string_view type_name(const Value& v) noexcept;

/// Structural equality. Int(k) equals Float(x) iff x is exactly k.
bool values_equal(const Value& a, const Value& b);

/// Stricter than values_equal: kinds must match and floats compare bitwise.
bool values_identical(const Value& a, const Value& b);

/// Shortest decimal that round-trips to `x`; always carries a '.' or exponent
/// so it re-reads as a real. Non-finite values print as nan, inf, -inf.
std::string format_float(double x);

/// Text of a single CSV cell (before CSV-level quoting).
std::string csv_cell(const Value& v);

/// Inverse of csv_cell under the cell grammar. Text that matches no other
/// form is returned as Str.
Value parse_cell(std::string_view text);

}  // namespace dagforge
