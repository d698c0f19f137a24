#include "dagforge/errors.hpp"

#include <sstream>

namespace dagforge {

std::string to_string(Span span) {
  return std::to_string(span.begin) + ".." + std::to_string(span.end);
}

LexError::LexError(Span span, const std::string& message)
    : Error("lex error at " + to_string(span) + ": " + message), span_(span), message_(message) {}

namespace {

std::string describe_parse_error(Span span, const std::vector<std::string>& expected,
                                 const std::string& found) {
  std::ostringstream os;
  os << "parse error at " << to_string(span) << ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
    os << expected[i];
  }
  os << ", found " << found;
  return os.str();
}

std::string with_node_prefix(const std::string& node, const std::string& message) {
  return node.empty() ? message : "node '" + node + "': " + message;
}

}  // namespace

ParseError::ParseError(Span span, std::vector<std::string> expected, std::string found)
    : Error(describe_parse_error(span, expected, found)),
      span_(span),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

EvalError::EvalError(Span span, const std::string& message, std::string node)
    : Error(with_node_prefix(node, "eval error at " + to_string(span) + ": " + message)),
      span_(span),
      message_(message),
      node_(std::move(node)) {}

EvalError EvalError::with_node(const std::string& node) const {
  return EvalError(span_, message_, node);
}

SpecError::SpecError(std::string path, const std::string& message)
    : Error((path.empty() ? std::string("<document>") : path) + ": " + message),
      path_(std::move(path)),
      message_(message) {}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "model validation failed";
  for (const auto& v : violations) out += "\n  - " + v;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

CoercionError::CoercionError(const std::string& message, std::string node)
    : Error(with_node_prefix(node, message)), node_(std::move(node)) {}

SelectionStarvation::SelectionStarvation(std::uint64_t attempts, std::uint64_t kept,
                                         std::uint64_t wanted)
    : Error("selection starvation: kept " + std::to_string(kept) + " of " +
            std::to_string(wanted) + " samples after " + std::to_string(attempts) +
            " attempts"),
      attempts_(attempts),
      kept_(kept) {}

}  // namespace dagforge
