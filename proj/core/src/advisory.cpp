#include "dsage/advisory.hpp"

#include <algorithm>
#include <cmath>

namespace dsage {

int cf_percent(CertaintyFactor score) noexcept {
  const double percent = std::round(score.value() * 1e8) / 1e6;
  return static_cast<int>(std::floor(percent + 0.5));
}

namespace {

int severity_rank(Severity s) {
  switch (s) {
    case Severity::evidence: return 0;
    case Severity::moderate: return 1;
    case Severity::none: return 2;
  }
  return 3;
}

}  // namespace

bool advisory_before(const Advisory& a, const Advisory& b) noexcept {
  if (a.cf_percent != b.cf_percent) return a.cf_percent > b.cf_percent;
  const int sa = severity_rank(a.hypothesis.severity());
  const int sb = severity_rank(b.hypothesis.severity());
  if (sa != sb) return sa < sb;
  const std::string da = a.hypothesis.display(), db = b.hypothesis.display();
  if (da != db) return da < db;
  // Display text can coincide for an unspecified season and no season.
  return a.hypothesis < b.hypothesis;
}

std::vector<Advisory> make_advisories(const KnowledgeBase& kb, const InferenceResult& result) {
  std::vector<Advisory> out;
  out.reserve(result.scores.size());
  for (const auto& [hypothesis, score] : result.scores) {
    Advisory a;
    a.hypothesis = hypothesis;
    a.score = score;
    a.cf_percent = cf_percent(score);
    if (hypothesis.severity() != Severity::none) {
      if (auto it = kb.mitigations.find(hypothesis.severity()); it != kb.mitigations.end()) {
        a.mitigation = it->second;
      }
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), advisory_before);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

}  // namespace dsage
