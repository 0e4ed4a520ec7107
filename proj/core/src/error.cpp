#include "dsage/error.hpp"

namespace dsage {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::cf_out_of_range: return "cf_out_of_range";
    case ErrorCode::empty_premises: return "empty_premises";
    case ErrorCode::unknown_indicator: return "unknown_indicator";
    case ErrorCode::illegal_state: return "illegal_state";
    case ErrorCode::invalid_kb: return "invalid_kb";
    case ErrorCode::reference_integrity: return "reference_integrity";
    case ErrorCode::unknown_rule: return "unknown_rule";
    case ErrorCode::unknown_hypothesis: return "unknown_hypothesis";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::missing_snapshot: return "missing_snapshot";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
    case ErrorCode::kb_conflict: return "kb_conflict";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace dsage
