#include "dsage/service/json.hpp"

#include <cstdio>

#include "dsage/advisory.hpp"
#include "dsage/dsl.hpp"

namespace dsage::api {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

namespace {

void dump_into(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      out += fixed6(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump_into(out, v, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    default:
      out += j.dump();
  }
}

Json season_json(const std::optional<Season>& s) {
  return s ? Json(std::string(to_string(*s))) : Json(nullptr);
}

}  // namespace

std::string dump_fixed(const Json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

Json to_json(const Indicator& ind) {
  Json states = Json::array();
  for (const auto& s : ind.legal_states) {
    states.push_back({{"verb", to_string(s.verb)}, {"value", s.value}});
  }
  return {{"name", ind.name},
          {"display_name", ind.display_name()},
          {"category", to_string(ind.category)},
          {"states", std::move(states)}};
}

Json to_json(const Hypothesis& h) {
  return {{"statement", h.statement()},
          {"season", season_json(h.season())},
          {"severity", to_string(h.severity())},
          {"display", h.display()}};
}

Json to_json(const Rule& rule) {
  Json premises = Json::array();
  for (const auto& c : rule.premises) {
    premises.push_back({{"object", c.object}, {"verb", to_string(c.verb)}, {"value", c.value}});
  }
  return {{"id", rule.id},
          {"premises", std::move(premises)},
          {"connective", to_string(rule.connective)},
          {"conclusion", to_json(rule.conclusion)},
          {"cf", rule.expert_cf},
          {"kind", to_string(rule.kind)}};
}

Json to_json(const Observation& obs) {
  return {{"object", obs.condition.object},
          {"verb", to_string(obs.condition.verb)},
          {"value", obs.condition.value},
          {"cf", obs.cf.value()},
          {"source", to_string(obs.source)}};
}

Json kb_to_json(const KnowledgeBase& kb, const std::string& version) {
  Json catalog = Json::array();
  for (const auto& ind : kb.catalog) catalog.push_back(to_json(ind));
  Json rules = Json::array();
  for (const Rule* r : kb.rules_by_id()) rules.push_back(to_json(*r));
  Json mitigations = Json::object();
  for (const auto& [severity, text] : kb.mitigations) {
    mitigations[std::string(to_string(severity))] = text;
  }
  return {{"version", version},
          {"format", dsl::kFormatVersion},
          {"catalog", std::move(catalog)},
          {"rules", std::move(rules)},
          {"mitigations", std::move(mitigations)}};
}

Json session_to_json(const Session& session) {
  Json obs = Json::array();
  for (const auto& [key, o] : session.wm) obs.push_back(to_json(o));
  return {{"id", session.id},
          {"created_at", format_timestamp(session.created_at)},
          {"kb_version", session.kb_version},
          {"observations", std::move(obs)},
          {"has_result", session.last_result.has_value()}};
}

Json consultation_to_json(const Consultation& c) {
  const InferenceResult empty;
  const InferenceResult& result = c.session.last_result ? *c.session.last_result : empty;

  Json advisories = Json::array();
  for (const auto& a : c.advisories) {
    Json trace = Json::array();
    for (const auto& step : explain(result, a.hypothesis)) {
      Json premises = Json::array();
      for (const auto& m : step.premises) {
        premises.push_back({{"object", m.object}, {"value", m.value}, {"cf", m.cf.value()}});
      }
      trace.push_back({{"rule", step.rule_id},
                       {"premises", std::move(premises)},
                       {"premise_cf", step.premise_cf.value()},
                       {"expert_cf", step.expert_cf.value()},
                       {"contribution", step.contribution.value()},
                       {"running", step.running.value()}});
    }
    advisories.push_back({{"rank", a.rank},
                          {"statement", a.hypothesis.statement()},
                          {"season", season_json(a.hypothesis.season())},
                          {"display", a.hypothesis.display()},
                          {"severity", to_string(a.hypothesis.severity())},
                          {"cf", a.score.value()},
                          {"cf_percent", a.cf_percent},
                          {"mitigation", a.mitigation ? Json(*a.mitigation) : Json(nullptr)},
                          {"trace", std::move(trace)}});
  }
  Json warnings = Json::array();
  for (const auto& w : result.warnings) {
    warnings.push_back({{"kind", "contradictory_observations"},
                        {"object", w.object},
                        {"values", w.values}});
  }
  Json skipped = Json::array();
  for (const auto& s : result.skipped) {
    Json missing = Json::array();
    for (const auto& k : s.missing) missing.push_back({{"object", k.object}, {"value", k.value}});
    skipped.push_back({{"rule", s.rule_id}, {"missing", std::move(missing)}});
  }
  return {{"schema", kConsultationSchema},
          {"session", c.session.id},
          {"kb_version", c.session.kb_version},
          {"advisories", std::move(advisories)},
          {"warnings", std::move(warnings)},
          {"skipped", std::move(skipped)}};
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

const Json& field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw BadRequest(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw BadRequest(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double number_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) throw BadRequest(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

Verb verb_field(const Json& j) {
  auto it = j.find("verb");
  if (it == j.end() || it->is_null()) return Verb::is;
  if (!it->is_string()) throw BadRequest("field 'verb' must be a string");
  auto v = parse_verb(it->get<std::string>());
  if (!v) throw BadRequest("field 'verb' must be one of is/shows/appears/are");
  return *v;
}

}  // namespace

Rule rule_from_json(const Json& j, const std::string& id) {
  if (!j.is_object()) throw BadRequest("rule body must be a JSON object");
  Rule rule;
  rule.id = id;
  if (auto it = j.find("id"); it != j.end() && (!it->is_string() || it->get<std::string>() != id)) {
    throw BadRequest("body id does not match the path");
  }
  const Json& premises = field(j, "premises");
  if (!premises.is_array()) throw BadRequest("field 'premises' must be an array");
  for (const auto& p : premises) {
    if (!p.is_object()) throw BadRequest("each premise must be an object");
    rule.premises.push_back(
        {normalize_name(string_field(p, "object")), verb_field(p), normalize_name(string_field(p, "value"))});
  }
  if (auto it = j.find("connective"); it != j.end() && !it->is_null()) {
    auto c = it->is_string() ? parse_connective(it->get<std::string>()) : std::nullopt;
    if (!c) throw BadRequest("field 'connective' must be 'and' or 'or'");
    rule.connective = *c;
  }
  const Json& conclusion = field(j, "conclusion");
  if (!conclusion.is_object()) throw BadRequest("field 'conclusion' must be an object");
  std::optional<Season> season;
  if (auto it = conclusion.find("season"); it != conclusion.end() && !it->is_null()) {
    season = it->is_string() ? parse_season(it->get<std::string>()) : std::nullopt;
    if (!season) throw BadRequest("unknown season");
  }
  rule.conclusion = Hypothesis(string_field(conclusion, "statement"), season);
  rule.expert_cf = number_field(j, "cf");
  if (auto it = j.find("kind"); it != j.end() && !it->is_null()) {
    auto k = it->is_string() ? parse_knowledge_kind(it->get<std::string>()) : std::nullopt;
    if (!k) throw BadRequest("field 'kind' must be derivation, factual or control");
    rule.kind = *k;
  }
  return rule;
}

Observation observation_from_json(const Json& j) {
  if (!j.is_object()) throw BadRequest("each observation must be an object");
  Observation obs;
  obs.condition.object = normalize_name(string_field(j, "object"));
  obs.condition.verb = verb_field(j);
  obs.condition.value = normalize_name(string_field(j, "value"));
  auto it = j.find("cf");
  if (it == j.end() || it->is_null()) {
    obs.cf = CertaintyFactor(1.0);
    obs.source = ObservationSource::default_cf;
  } else {
    if (!it->is_number()) throw BadRequest("field 'cf' must be a number");
    obs.cf = CertaintyFactor(it->get<double>());
    obs.source = ObservationSource::user;
  }
  return obs;
}

std::vector<Observation> observations_from_json(const Json& j) {
  if (!j.is_object()) throw BadRequest("body must be a JSON object");
  const Json& list = field(j, "observations");
  if (!list.is_array()) throw BadRequest("field 'observations' must be an array");
  std::vector<Observation> out;
  for (const auto& o : list) out.push_back(observation_from_json(o));
  return out;
}

}  // namespace dsage::api
