#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsage {

// Machine-readable failure classes. The string forms are part of the HTTP
// API and must stay stable.
enum class ErrorCode {
  cf_out_of_range,
  empty_premises,
  unknown_indicator,
  illegal_state,
  invalid_kb,
  reference_integrity,
  unknown_rule,
  unknown_hypothesis,
  unknown_session,
  missing_snapshot,
  digest_mismatch,
  kb_conflict,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsage
