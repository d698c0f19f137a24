#include "dagforge/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "dagforge/errors.hpp"

namespace dagforge {

void check_tensor(const Tensor& t) {
  if (t.shape.empty()) throw DomainError("tensor shape must have at least one dimension");
  std::size_t expected = 1;
  for (auto dim : t.shape) {
    if (dim < 1) throw DomainError("tensor dimensions must be positive");
    if (expected > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(dim))
      throw DomainError("tensor too large");
    expected *= static_cast<std::size_t>(dim);
  }
  if (t.data.size() != expected)
    throw DomainError("tensor data length " + std::to_string(t.data.size()) +
                      " does not match shape product " + std::to_string(expected));
}

Value Value::boolean(bool b) { return Value(Storage(std::in_place_type<bool>, b)); }
Value Value::integer(std::int64_t i) { return Value(Storage(std::in_place_type<std::int64_t>, i)); }
Value Value::real(double x) { return Value(Storage(std::in_place_type<double>, x)); }
Value Value::str(std::string s) { return Value(Storage(std::in_place_type<std::string>, std::move(s))); }

Value Value::list(List items) {
  return Value(Storage(std::make_shared<const List>(std::move(items))));
}

Value Value::tensor(Tensor t) {
  check_tensor(t);
  return Value(Storage(std::make_shared<const Tensor>(std::move(t))));
}

Value::Kind Value::kind() const noexcept {
  switch (data_.index()) {
    case 1: return Kind::Bool;
    case 2: return Kind::Int;
    case 3: return Kind::Float;
    case 4: return Kind::Str;
    case 5: return Kind::List;
    case 6: return Kind::Tensor;
    default: return Kind::Missing;
  }
}

namespace {

[[noreturn]] void kind_mismatch(const Value& v, std::string_view wanted) {
  throw DomainError("expected " + std::string(wanted) + ", got " + std::string(type_name(v)));
}

}  // namespace

bool Value::as_bool() const {
  if (!is_bool()) kind_mismatch(*this, "bool");
  return std::get<bool>(data_);
}

std::int64_t Value::as_int() const {
  if (!is_int()) kind_mismatch(*this, "int");
  return std::get<std::int64_t>(data_);
}

double Value::as_float() const {
  if (!is_float()) kind_mismatch(*this, "float");
  return std::get<double>(data_);
}

const std::string& Value::as_str() const {
  if (!is_str()) kind_mismatch(*this, "str");
  return std::get<std::string>(data_);
}

const List& Value::as_list() const {
  if (!is_list()) kind_mismatch(*this, "list");
  return *std::get<std::shared_ptr<const List>>(data_);
}

const Tensor& Value::as_tensor() const {
  if (!is_tensor()) kind_mismatch(*this, "tensor");
  return *std::get<std::shared_ptr<const Tensor>>(data_);
}

double Value::to_double() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(data_));
  if (is_float()) return std::get<double>(data_);
  kind_mismatch(*this, "number");
}

std::string_view kind_name(Value::Kind kind) noexcept {
  switch (kind) {
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Int: return "int";
    case Value::Kind::Float: return "float";
    case Value::Kind::Str: return "str";
    case Value::Kind::List: return "list";
    case Value::Kind::Tensor: return "tensor";
    case Value::Kind::Missing: return "missing";
  }
  return "missing";
}

std::string_view type_name(const Value& v) noexcept { return kind_name(v.kind()); }

namespace {

bool int_equals_float(std::int64_t k, double x) {
  // 2^63 is exactly representable; anything at or above it cannot be an int64.
  constexpr double two63 = 9223372036854775808.0;
  if (!(x >= -two63 && x < two63)) return false;
  if (std::trunc(x) != x) return false;
  return static_cast<std::int64_t>(x) == k;
}

bool floats_equal(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

}  // namespace

bool values_equal(const Value& a, const Value& b) {
  using K = Value::Kind;
  const K ka = a.kind();
  const K kb = b.kind();
  if (ka == K::Int && kb == K::Float) return int_equals_float(a.as_int(), b.as_float());
  if (ka == K::Float && kb == K::Int) return int_equals_float(b.as_int(), a.as_float());
  if (ka != kb) return false;
  switch (ka) {
    case K::Missing: return true;
    case K::Bool: return a.as_bool() == b.as_bool();
    case K::Int: return a.as_int() == b.as_int();
    case K::Float: return floats_equal(a.as_float(), b.as_float());
    case K::Str: return a.as_str() == b.as_str();
    case K::List: {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i)
        if (!values_equal(la[i], lb[i])) return false;
      return true;
    }
    case K::Tensor: {
      const auto& ta = a.as_tensor();
      const auto& tb = b.as_tensor();
      if (ta.shape != tb.shape) return false;
      for (std::size_t i = 0; i < ta.data.size(); ++i)
        if (!floats_equal(ta.data[i], tb.data[i])) return false;
      return true;
    }
  }
  return false;
}

bool values_identical(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::Float:
      return std::bit_cast<std::uint64_t>(a.as_float()) == std::bit_cast<std::uint64_t>(b.as_float());
    case K::List: {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i)
        if (!values_identical(la[i], lb[i])) return false;
      return true;
    }
    case K::Tensor: {
      const auto& ta = a.as_tensor();
      const auto& tb = b.as_tensor();
      if (ta.shape != tb.shape) return false;
      for (std::size_t i = 0; i < ta.data.size(); ++i)
        if (std::bit_cast<std::uint64_t>(ta.data[i]) != std::bit_cast<std::uint64_t>(tb.data[i]))
          return false;
      return true;
    }
    default:
      return values_equal(a, b);
  }
}

std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void append_tensor(std::string& out, const Tensor& t) {
  out += "{\"shape\":[";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(t.shape[i]);
  }
  out += "],\"data\":[";
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    if (i) out += ',';
    out += format_float(t.data[i]);
  }
  out += "]}";
}

void append_nested(std::string& out, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Missing: out += "null"; break;
    case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Value::Kind::Int: out += std::to_string(v.as_int()); break;
    case Value::Kind::Float: out += format_float(v.as_float()); break;
    case Value::Kind::Str: append_json_string(out, v.as_str()); break;
    case Value::Kind::List: {
      out += '[';
      bool first = true;
      for (const auto& item : v.as_list()) {
        if (!first) out += ',';
        first = false;
        append_nested(out, item);
      }
      out += ']';
      break;
    }
    case Value::Kind::Tensor: append_tensor(out, v.as_tensor()); break;
  }
}

}  // namespace

std::string csv_cell(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Missing: return {};
    case Value::Kind::Str: return v.as_str();
    default: {
      std::string out;
      append_nested(out, v);
      return out;
    }
  }
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_real(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.find_first_of(".eE") == std::string_view::npos) return std::nullopt;
  if (s.find_first_not_of("0123456789+-.eE") != std::string_view::npos) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<Value> parse_scalar(std::string_view s) {
  if (s == "true") return Value::boolean(true);
  if (s == "false") return Value::boolean(false);
  if (auto i = parse_int(s)) return Value::integer(*i);
  if (auto x = parse_real(s)) return Value::real(*x);
  return std::nullopt;
}

/// Reader for the bracketed cell grammar; any failure yields nullopt.
class NestedReader {
 public:
  explicit NestedReader(std::string_view text) : text_(text) {}

  std::optional<Value> read_all() {
    auto v = read_value();
    if (!v || pos_ != text_.size()) return std::nullopt;
    return v;
  }

 private:
  std::optional<Value> read_value() {
    if (pos_ >= text_.size()) return std::nullopt;
    const char c = text_[pos_];
    if (c == '[') return read_list();
    if (c == '{') return read_tensor();
    if (c == '"') {
      auto s = read_string();
      if (!s) return std::nullopt;
      return Value::str(std::move(*s));
    }
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}')
      ++pos_;
    const auto token = text_.substr(start, pos_ - start);
    if (token == "null") return Value::missing();
    return parse_scalar(token);
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  std::optional<Value> read_list() {
    ++pos_;
    List items;
    if (eat(']')) return Value::list(std::move(items));
    while (true) {
      auto item = read_value();
      if (!item) return std::nullopt;
      items.push_back(std::move(*item));
      if (eat(']')) return Value::list(std::move(items));
      if (!eat(',')) return std::nullopt;
    }
  }

  template <typename T, typename Parse>
  std::optional<std::vector<T>> read_number_array(Parse parse) {
    if (!eat('[')) return std::nullopt;
    std::vector<T> out;
    if (eat(']')) return out;
    while (true) {
      const auto start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']') ++pos_;
      auto n = parse(text_.substr(start, pos_ - start));
      if (!n) return std::nullopt;
      out.push_back(*n);
      if (eat(']')) return out;
      if (!eat(',')) return std::nullopt;
    }
  }

  std::optional<Value> read_tensor() {
    if (!eat("{\"shape\":")) return std::nullopt;
    auto shape = read_number_array<std::int64_t>(parse_int);
    if (!shape || !eat(",\"data\":")) return std::nullopt;
    auto data = read_number_array<double>([](std::string_view s) -> std::optional<double> {
      if (auto x = parse_real(s)) return x;
      if (auto i = parse_int(s)) return static_cast<double>(*i);
      return std::nullopt;
    });
    if (!data || !eat('}')) return std::nullopt;
    Tensor t{std::move(*shape), std::move(*data)};
    try {
      check_tensor(t);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    return Value::tensor(std::move(t));
  }

  std::optional<std::string> read_string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) return std::nullopt;
      const char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u': {
          if (pos_ + 4 > text_.size()) return std::nullopt;
          unsigned code = 0;
          auto hex = text_.substr(pos_, 4);
          auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + 4, code, 16);
          if (ec != std::errc() || ptr != hex.data() + 4 || code >= 0x80) return std::nullopt;
          out += static_cast<char>(code);
          pos_ += 4;
          break;
        }
        default: return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Value parse_cell(std::string_view text) {
  if (text.empty()) return Value::missing();
  if (text.front() == '[' || text.front() == '{') {
    if (auto v = NestedReader(text).read_all()) return *v;
    return Value::str(std::string(text));
  }
  if (auto v = parse_scalar(text)) return *v;
  return Value::str(std::string(text));
}

}  // namespace dagforge
