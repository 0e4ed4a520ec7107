#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsage/inference.hpp"
#include "dsage/kb.hpp"

namespace dsage::testing {

// Reference scorer written without the engine: looks premises up in a flat
// table, takes min/max by hand and evaluates the closed form
// 1 - prod(1 - r_i * p_i) per hypothesis.
struct OracleKey {
  std::string statement;
  int season = -1;  // -1 when absent

  auto operator<=>(const OracleKey&) const = default;
};

inline OracleKey oracle_key(const Hypothesis& h) {
  return {h.statement(), h.season() ? static_cast<int>(*h.season()) : -1};
}

using OracleScores = std::map<OracleKey, double>;

inline OracleScores oracle_scores(const KnowledgeBase& kb,
                                  const std::vector<std::pair<std::string, std::string>>& keys,
                                  const std::vector<double>& cfs) {
  auto lookup = [&](const Condition& c) -> std::optional<double> {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i].first == c.object && keys[i].second == c.value) return cfs[i];
    }
    return std::nullopt;
  };

  std::map<OracleKey, double> complement;
  for (const Rule& rule : kb.rules) {
    std::vector<double> found;
    bool all = true;
    for (const auto& p : rule.premises) {
      if (auto v = lookup(p)) {
        found.push_back(*v);
      } else {
        all = false;
      }
    }
    double premise = 0.0;
    if (rule.connective == Connective::all_of) {
      if (!all || found.empty()) continue;
      premise = *std::min_element(found.begin(), found.end());
    } else {
      if (found.empty()) continue;
      premise = *std::max_element(found.begin(), found.end());
    }
    auto [it, fresh] = complement.try_emplace(oracle_key(rule.conclusion), 1.0);
    it->second *= 1.0 - rule.expert_cf * premise;
  }

  OracleScores out;
  for (const auto& [k, prod] : complement) out[k] = 1.0 - prod;
  return out;
}

inline OracleScores oracle_scores(const KnowledgeBase& kb, const WorkingMemory& wm) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::vector<double> cfs;
  for (const auto& [k, obs] : wm) {
    keys.emplace_back(k.object, k.value);
    cfs.push_back(obs.cf.value());
  }
  return oracle_scores(kb, keys, cfs);
}

inline OracleScores engine_scores(const InferenceResult& r) {
  OracleScores out;
  for (const auto& [h, cf] : r.scores) out[oracle_key(h)] = cf.value();
  return out;
}

}  // namespace dsage::testing
