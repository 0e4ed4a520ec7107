#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsage/kb.hpp"

namespace dsage::dsl {

inline constexpr int kFormatVersion = 1;
inline constexpr std::size_t kMaxErrors = 100;

struct SourceSpan {
  std::string file;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes

  bool operator==(const SourceSpan&) const = default;
};

enum class ErrorKind { lex, syntax, semantic };

std::string_view to_string(ErrorKind kind) noexcept;

struct ParseError {
  SourceSpan span;
  ErrorKind kind = ErrorKind::syntax;
  std::string message;

  // file:line:col: kind error: message
  std::string format() const;
};

struct ParseResult {
  std::optional<KnowledgeBase> kb;  // set iff errors is empty
  std::vector<ParseError> errors;

  bool ok() const noexcept { return kb.has_value(); }
};

// Parses a .dkb document. Never throws on malformed input; every problem
// is reported as a ParseError with a span inside the text. Collection stops
// after kMaxErrors. A successful result always passes validate().
ParseResult parse_kb(std::string_view text, std::string_view file_name = "<input>");

// Canonical text: header, indicators grouped by category then name, rules
// in ascending id order, mitigations by severity. Two-space indent, LF.
std::string serialize_kb(const KnowledgeBase& kb);

// Shortest decimal with at most six fraction digits ("0.8", "1", "0.68").
std::string format_cf(double value);

}  // namespace dsage::dsl
