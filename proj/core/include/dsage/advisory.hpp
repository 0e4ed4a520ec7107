#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsage/inference.hpp"
#include "dsage/kb.hpp"

namespace dsage {

// One line of a drought forecast advisory.
struct Advisory {
  Hypothesis hypothesis;
  CertaintyFactor score;
  int cf_percent = 0;
  std::optional<std::string> mitigation;
  int rank = 0;  // 1-based

  bool operator==(const Advisory&) const = default;
};

// round(score * 100), half-up. The score is first snapped to 1e-6 of a
// percent so 0.945 gives 95 despite binary representation.
int cf_percent(CertaintyFactor score) noexcept;

// Strict total order for presentation: higher percent first, then
// evidence > moderate > none, then display text.
bool advisory_before(const Advisory& a, const Advisory& b) noexcept;

std::vector<Advisory> make_advisories(const KnowledgeBase& kb, const InferenceResult& result);

}  // namespace dsage
