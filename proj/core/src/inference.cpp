#include "dsage/inference.hpp"

#include <algorithm>

#include "dsage/error.hpp"

namespace dsage {

std::string_view to_string(ObservationSource s) noexcept {
  return s == ObservationSource::user ? "user" : "default";
}

void WorkingMemory::put(Observation obs) {
  ObservationKey key{obs.condition.object, obs.condition.value};
  items_.insert_or_assign(std::move(key), std::move(obs));
}

bool WorkingMemory::erase(const ObservationKey& key) { return items_.erase(key) > 0; }

const Observation* WorkingMemory::find(const ObservationKey& key) const {
  auto it = items_.find(key);
  return it == items_.end() ? nullptr : &it->second;
}

void check_observation(const KnowledgeBase& kb, const Observation& obs) {
  const Indicator* ind = kb.find_indicator(obs.condition.object);
  if (ind == nullptr) {
    throw Error(ErrorCode::unknown_indicator,
                "unknown indicator '" + obs.condition.object + "'");
  }
  if (!ind->allows(obs.condition.value)) {
    throw Error(ErrorCode::illegal_state, "indicator '" + obs.condition.object +
                                              "' has no state '" + obs.condition.value + "'");
  }
}

namespace {

struct Match {
  std::vector<MatchedObservation> matched;
  std::vector<ObservationKey> missing;
};

Match match_premises(const Rule& rule, const WorkingMemory& wm) {
  Match m;
  for (const auto& c : rule.premises) {
    ObservationKey key{c.object, c.value};
    if (const Observation* obs = wm.find(key)) {
      m.matched.push_back({c.object, c.value, obs->cf});
    } else {
      m.missing.push_back(std::move(key));
    }
  }
  return m;
}

std::optional<CertaintyFactor> aggregate(const Rule& rule, const Match& m) {
  if (rule.premises.empty() || m.matched.empty()) return std::nullopt;
  std::vector<CertaintyFactor> cfs;
  cfs.reserve(m.matched.size());
  for (const auto& mo : m.matched) cfs.push_back(mo.cf);
  if (rule.connective == Connective::all_of) {
    if (!m.missing.empty()) return std::nullopt;
    return cf::aggregate_and(cfs);
  }
  return cf::aggregate_or(cfs);
}

}  // namespace

std::optional<CertaintyFactor> premise_cf(const Rule& rule, const WorkingMemory& wm) {
  return aggregate(rule, match_premises(rule, wm));
}

InferenceResult run(const KnowledgeBase& kb, const WorkingMemory& wm) {
  InferenceResult result;

  std::map<std::string, std::vector<std::string>> values_by_object;
  for (const auto& [key, obs] : wm) {
    check_observation(kb, obs);
    values_by_object[key.object].push_back(key.value);
  }
  for (auto& [object, values] : values_by_object) {
    if (values.size() > 1) result.warnings.push_back({object, std::move(values)});
  }

  for (const Rule* rule : kb.rules_by_id()) {
    Match m = match_premises(*rule, wm);
    auto premise = aggregate(*rule, m);
    if (!premise) {
      result.skipped.push_back({rule->id, std::move(m.missing)});
      continue;
    }
    const CertaintyFactor expert(rule->expert_cf);
    const CertaintyFactor contribution = cf::fire(expert, *premise);
    result.firings.push_back(
        {rule->id, rule->conclusion, expert, *premise, contribution, std::move(m.matched)});

    auto [it, inserted] = result.scores.try_emplace(rule->conclusion, contribution);
    if (!inserted) it->second = cf::combine(it->second, contribution);
  }
  return result;
}

std::vector<TraceStep> explain(const InferenceResult& result, const Hypothesis& hypothesis) {
  if (!result.scores.contains(hypothesis)) {
    throw Error(ErrorCode::unknown_hypothesis,
                "hypothesis '" + hypothesis.display() + "' has no score");
  }
  std::vector<TraceStep> trace;
  std::optional<CertaintyFactor> running;
  for (const auto& f : result.firings) {
    if (!(f.conclusion == hypothesis)) continue;
    running = running ? cf::combine(*running, f.contribution_cf) : f.contribution_cf;
    trace.push_back({f.rule_id, f.matched, f.premise_cf, f.expert_cf, f.contribution_cf, *running});
  }
  return trace;
}

}  // namespace dsage
