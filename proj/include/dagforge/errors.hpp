#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagforge {

/// Half-open byte range into an expression's source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

std::string to_string(Span span);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
 public:
  LexError(Span span, const std::string& message);
  Span span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }

 private:
  Span span_;
  std::string message_;
};

class ParseError : public Error {
 public:
  ParseError(Span span, std::vector<std::string> expected, std::string found);
  Span span() const noexcept { return span_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  Span span_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// Raised by built-in functions when an argument is outside the function's
/// domain or has the wrong kind. The evaluator rewraps it as EvalError.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  EvalError(Span span, const std::string& message, std::string node = {});
  Span span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& node() const noexcept { return node_; }

  EvalError with_node(const std::string& node) const;

 private:
  Span span_;
  std::string message_;
  std::string node_;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Schema-level problem in a model document; `path` is a dotted YAML path.
class SpecError : public Error {
 public:
  SpecError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string path_;
  std::string message_;
};

/// The document is not well-formed YAML at all.
class YamlSyntaxError : public SpecError {
 public:
  using SpecError::SpecError;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

class CoercionError : public Error {
 public:
  CoercionError(const std::string& message, std::string node = {});
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

class SelectionStarvation : public Error {
 public:
  SelectionStarvation(std::uint64_t attempts, std::uint64_t kept, std::uint64_t wanted);
  std::uint64_t attempts() const noexcept { return attempts_; }
  std::uint64_t kept() const noexcept { return kept_; }

 private:
  std::uint64_t attempts_;
  std::uint64_t kept_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class StratumNameError : public Error {
 public:
  using Error::Error;
};

}  // namespace dagforge
