#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dsage/inference.hpp"
#include "dsage/kb.hpp"
#include "dsage/session.hpp"

namespace dsage::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// Uniform over [0, 1] with extra mass on the endpoints.
inline double random_unit(Rng& rng) {
  const auto r = pick(rng, 0, 19);
  if (r == 0) return 0.0;
  if (r == 1) return 1.0;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// A CF on the 1e-6 grid, the precision the text format keeps.
inline double random_grid_cf(Rng& rng) {
  const auto r = pick(rng, 0, 19);
  if (r == 0) return 0.0;
  if (r == 1) return 1.0;
  return static_cast<double>(pick(rng, 0, 1'000'000)) / 1e6;
}

inline const std::vector<std::string>& statement_pool() {
  static const std::vector<std::string> pool = {
      "No evidence of drought", "Moderate evidence of drought", "Evidence of drought",
      "Evidence of severe drought", "Late rains expected"};
  return pool;
}

inline std::string random_alias(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "Tree", "bird", " ", "\"quoted\"", "back\\slash", "tab\there", "line\nbreak",
      "caf\xC3\xA9", "#hash", "{brace}", "x", "Ant-1", "\x01", "\x7f"};
  std::string out;
  const auto n = pick(rng, 0, 4);
  for (std::size_t i = 0; i < n; ++i) out += pieces[pick(rng, 0, pieces.size() - 1)];
  return out;
}

struct KbShape {
  std::size_t min_indicators = 1;
  std::size_t max_indicators = 8;
  std::size_t min_states = 1;
  std::size_t max_states = 3;
  std::size_t min_rules = 0;
  std::size_t max_rules = 12;
  std::size_t max_premises = 4;
  bool decorate = true;  // aliases, kinds, seasons, exotic ids
};

// A random KB that passes validate().
inline KnowledgeBase random_kb(Rng& rng, const KbShape& shape = {}) {
  static const std::vector<std::string> values = {"high", "low",   "sighted", "blooming",
                                                  "none", "thin",  "wilting", "clear",
                                                  "full", "half_", "very-low"};
  static const std::vector<std::string> stems = {"rain", "moon", "frog", "tree",
                                                 "ant",  "soil", "sky",  "bird_x"};
  KnowledgeBase kb;
  const auto n_ind = pick(rng, shape.min_indicators, shape.max_indicators);
  for (std::size_t i = 0; i < n_ind; ++i) {
    Indicator ind;
    ind.name = stems[pick(rng, 0, stems.size() - 1)] + std::to_string(i);
    if (shape.decorate && coin(rng, 0.2)) ind.name = "i-" + ind.name;
    ind.category = static_cast<IndicatorCategory>(pick(rng, 0, 3));
    std::vector<std::string> vals = values;
    std::shuffle(vals.begin(), vals.end(), rng);
    const auto n_states = pick(rng, shape.min_states, shape.max_states);
    for (std::size_t s = 0; s < n_states; ++s) {
      ind.legal_states.push_back({static_cast<Verb>(pick(rng, 0, 3)), vals[s]});
    }
    if (shape.decorate && coin(rng)) ind.alias = random_alias(rng);
    kb.catalog.push_back(std::move(ind));
  }

  std::vector<Condition> conditions;
  for (const auto& ind : kb.catalog) {
    for (const auto& st : ind.legal_states) conditions.push_back({ind.name, st.verb, st.value});
  }

  std::set<std::string> ids;
  const auto n_rules = pick(rng, shape.min_rules, shape.max_rules);
  static const std::vector<std::string> prefixes = {"R", "RC", "X", "rule_", "Ra-"};
  while (kb.rules.size() < n_rules) {
    Rule rule;
    rule.id = (shape.decorate ? prefixes[pick(rng, 0, prefixes.size() - 1)] : std::string("R")) +
              std::to_string(pick(rng, 1, 60));
    if (!ids.insert(rule.id).second) continue;
    std::vector<Condition> pool = conditions;
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto n_prem = pick(rng, 1, std::min(shape.max_premises, pool.size()));
    rule.premises.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_prem));
    // Verbs in premises may differ from the catalog's; matching ignores them.
    if (shape.decorate) {
      for (auto& p : rule.premises) {
        if (coin(rng, 0.2)) p.verb = static_cast<Verb>(pick(rng, 0, 3));
      }
    }
    rule.connective = coin(rng, 0.3) ? Connective::any_of : Connective::all_of;
    std::optional<Season> season;
    if (shape.decorate && coin(rng, 0.4)) season = static_cast<Season>(pick(rng, 0, 4));
    const auto& pool_s = statement_pool();
    rule.conclusion = Hypothesis(pool_s[pick(rng, 0, pool_s.size() - 1)], season);
    rule.expert_cf = random_grid_cf(rng);
    if (shape.decorate) rule.kind = static_cast<KnowledgeKind>(pick(rng, 0, 2));
    kb.rules.push_back(std::move(rule));
  }

  for (const auto& r : kb.rules) {
    const Severity s = r.conclusion.severity();
    if (s != Severity::none) kb.mitigations[s] = "Act on " + std::string(to_string(s)) + " \"now\"";
  }
  if (shape.decorate && coin(rng, 0.2)) kb.mitigations[Severity::none] = "No action needed";
  return kb;
}

// Observations drawn from the catalog's legal states.
inline WorkingMemory random_wm(Rng& rng, const KnowledgeBase& kb, double density = 0.5) {
  WorkingMemory wm;
  for (const auto& ind : kb.catalog) {
    for (const auto& st : ind.legal_states) {
      if (!coin(rng, density)) continue;
      Observation obs;
      obs.condition = {ind.name, st.verb, st.value};
      obs.cf = CertaintyFactor(random_unit(rng));
      obs.source = coin(rng, 0.8) ? ObservationSource::user : ObservationSource::default_cf;
      wm.put(std::move(obs));
    }
  }
  return wm;
}

inline std::vector<Observation> observations_of(const WorkingMemory& wm) {
  std::vector<Observation> out;
  for (const auto& [k, o] : wm) out.push_back(o);
  return out;
}

inline Session random_session(Rng& rng, const KnowledgeBase& kb, const std::string& kb_version) {
  Session s;
  s.id = new_session_id();
  s.created_at = Timestamp{std::chrono::seconds(static_cast<long long>(pick(rng, 0, 4'000'000'000)))};
  s.kb_version = kb_version;
  s.wm = random_wm(rng, kb);
  return s;
}

}  // namespace dsage::testing
