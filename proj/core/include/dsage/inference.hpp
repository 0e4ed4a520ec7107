#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsage/cf.hpp"
#include "dsage/kb.hpp"

namespace dsage {

enum class ObservationSource { user, default_cf };

std::string_view to_string(ObservationSource s) noexcept;

struct Observation {
  Condition condition;
  CertaintyFactor cf{1.0};
  ObservationSource source = ObservationSource::user;

  bool operator==(const Observation&) const = default;
};

struct ObservationKey {
  std::string object;
  std::string value;

  auto operator<=>(const ObservationKey&) const = default;
};

// Facts asserted for one consultation, at most one per (object, value).
class WorkingMemory {
 public:
  using Map = std::map<ObservationKey, Observation>;

  // Inserts or overwrites the observation with the same key.
  void put(Observation obs);
  bool erase(const ObservationKey& key);
  const Observation* find(const ObservationKey& key) const;

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  Map::const_iterator begin() const noexcept { return items_.begin(); }
  Map::const_iterator end() const noexcept { return items_.end(); }

  bool operator==(const WorkingMemory&) const = default;

 private:
  Map items_;
};

struct MatchedObservation {
  std::string object;
  std::string value;
  CertaintyFactor cf;

  bool operator==(const MatchedObservation&) const = default;
};

struct RuleFiring {
  std::string rule_id;
  Hypothesis conclusion;
  CertaintyFactor expert_cf;
  CertaintyFactor premise_cf;
  CertaintyFactor contribution_cf;
  std::vector<MatchedObservation> matched;

  bool operator==(const RuleFiring&) const = default;
};

struct SkippedRule {
  std::string rule_id;
  std::vector<ObservationKey> missing;

  bool operator==(const SkippedRule&) const = default;
};

// Same object observed with more than one value. Allowed, but surfaced.
struct ContradictionWarning {
  std::string object;
  std::vector<std::string> values;

  bool operator==(const ContradictionWarning&) const = default;
};

struct InferenceResult {
  std::map<Hypothesis, CertaintyFactor> scores;
  std::vector<RuleFiring> firings;  // ascending rule id
  std::vector<SkippedRule> skipped;  // ascending rule id
  std::vector<ContradictionWarning> warnings;

  bool operator==(const InferenceResult&) const = default;
};

// Rejects observations that do not match the catalog.
// Throws Error(unknown_indicator) or Error(illegal_state).
void check_observation(const KnowledgeBase& kb, const Observation& obs);

// AND: every premise matched, else nullopt. OR: max over the matched
// premises, nullopt if none matched.
std::optional<CertaintyFactor> premise_cf(const Rule& rule, const WorkingMemory& wm);

// One forward pass over all rules in ascending id order. Conclusions are
// hypotheses and are not asserted back into working memory.
InferenceResult run(const KnowledgeBase& kb, const WorkingMemory& wm);

struct TraceStep {
  std::string rule_id;
  std::vector<MatchedObservation> premises;
  CertaintyFactor premise_cf;
  CertaintyFactor expert_cf;
  CertaintyFactor contribution;
  CertaintyFactor running;

  bool operator==(const TraceStep&) const = default;
};

// The fold that produced a hypothesis score, one step per contributing rule.
// Throws Error(unknown_hypothesis) if the hypothesis did not score.
std::vector<TraceStep> explain(const InferenceResult& result, const Hypothesis& hypothesis);

}  // namespace dsage
