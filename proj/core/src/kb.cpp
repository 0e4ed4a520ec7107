#include "dsage/kb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <utility>

#include "dsage/cf.hpp"

namespace dsage {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view s, const std::array<Enum, N>& values) {
  for (Enum v : values) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_sep = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(lower(c));
  }
  return out;
}

bool is_identifier(std::string_view s) noexcept {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!std::isalpha(first) && first != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

std::string_view to_string(IndicatorCategory v) noexcept {
  switch (v) {
    case IndicatorCategory::animal: return "animal";
    case IndicatorCategory::plant: return "plant";
    case IndicatorCategory::meteorological: return "meteorological";
    case IndicatorCategory::astronomical: return "astronomical";
  }
  return "?";
}

std::string_view to_string(Verb v) noexcept {
  switch (v) {
    case Verb::is: return "is";
    case Verb::shows: return "shows";
    case Verb::appears: return "appears";
    case Verb::are: return "are";
  }
  return "?";
}

std::string_view to_string(Connective v) noexcept {
  return v == Connective::all_of ? "and" : "or";
}

std::string_view to_string(Severity v) noexcept {
  switch (v) {
    case Severity::none: return "none";
    case Severity::moderate: return "moderate";
    case Severity::evidence: return "evidence";
  }
  return "?";
}

std::string_view to_string(Season v) noexcept {
  switch (v) {
    case Season::spring: return "spring";
    case Season::summer: return "summer";
    case Season::autumn: return "autumn";
    case Season::winter: return "winter";
    case Season::unspecified: return "unspecified";
  }
  return "?";
}

std::string_view to_string(KnowledgeKind v) noexcept {
  switch (v) {
    case KnowledgeKind::derivation: return "derivation";
    case KnowledgeKind::factual: return "factual";
    case KnowledgeKind::control: return "control";
  }
  return "?";
}

std::optional<IndicatorCategory> parse_category(std::string_view s) noexcept {
  return lookup(s, std::array{IndicatorCategory::animal, IndicatorCategory::plant,
                              IndicatorCategory::meteorological,
                              IndicatorCategory::astronomical});
}

std::optional<Verb> parse_verb(std::string_view s) noexcept {
  return lookup(s, std::array{Verb::is, Verb::shows, Verb::appears, Verb::are});
}

std::optional<Connective> parse_connective(std::string_view s) noexcept {
  return lookup(s, std::array{Connective::all_of, Connective::any_of});
}

std::optional<Severity> parse_severity(std::string_view s) noexcept {
  return lookup(s, std::array{Severity::none, Severity::moderate, Severity::evidence});
}

std::optional<Season> parse_season(std::string_view s) noexcept {
  return lookup(s, std::array{Season::spring, Season::summer, Season::autumn, Season::winter,
                              Season::unspecified});
}

std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s) noexcept {
  return lookup(s, std::array{KnowledgeKind::derivation, KnowledgeKind::factual,
                              KnowledgeKind::control});
}

bool Indicator::allows(std::string_view value) const {
  return std::any_of(legal_states.begin(), legal_states.end(),
                     [&](const State& s) { return s.value == value; });
}

// ---------------------------------------------------------------------------
// Hypothesis

std::string canonical_statement(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(lower(c));
  }
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

Severity severity_of(std::string_view canonical) {
  std::string s;
  for (char c : canonical) s.push_back(lower(c));
  std::string_view v = s;
  if (v.starts_with("no evidence")) return Severity::none;
  if (v.starts_with("moderate evidence")) return Severity::moderate;
  if (v.starts_with("evidence")) return Severity::evidence;
  return Severity::none;
}

Hypothesis::Hypothesis(std::string_view statement, std::optional<Season> season)
    : statement_(canonical_statement(statement)),
      severity_(severity_of(statement_)),
      season_(season) {}

std::string Hypothesis::display() const {
  std::string out = statement_;
  if (season_ && *season_ != Season::unspecified) {
    out += ", onset of ";
    out += to_string(*season_);
  }
  return out;
}

bool operator<(const Hypothesis& a, const Hypothesis& b) {
  if (a.statement_ != b.statement_) return a.statement_ < b.statement_;
  return a.season_ < b.season_;
}

// ---------------------------------------------------------------------------
// Rule ids

bool RuleIdLess::operator()(std::string_view a, std::string_view b) const noexcept {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      std::string_view da = a.substr(i, ie - i), db = b.substr(j, je - j);
      while (da.size() > 1 && da.front() == '0') da.remove_prefix(1);
      while (db.size() > 1 && db.front() == '0') db.remove_prefix(1);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;  // tie-break on leading zeros
}

// ---------------------------------------------------------------------------
// KnowledgeBase

const Indicator* KnowledgeBase::find_indicator(std::string_view name) const noexcept {
  for (const auto& ind : catalog) {
    if (ind.name == name) return &ind;
  }
  return nullptr;
}

const Rule* KnowledgeBase::find_rule(std::string_view id) const noexcept {
  for (const auto& r : rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::vector<const Rule*> KnowledgeBase::rules_by_id() const {
  std::vector<const Rule*> out;
  out.reserve(rules.size());
  for (const auto& r : rules) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(),
                   [](const Rule* a, const Rule* b) { return RuleIdLess{}(a->id, b->id); });
  return out;
}

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  if (a.catalog.size() != b.catalog.size() || a.rules.size() != b.rules.size() ||
      a.mitigations != b.mitigations) {
    return false;
  }
  auto by_name = [](const Indicator& x, const Indicator& y) { return x.name < y.name; };
  auto by_id = [](const Rule& x, const Rule& y) { return RuleIdLess{}(x.id, y.id); };
  auto ca = a.catalog, cb = b.catalog;
  std::stable_sort(ca.begin(), ca.end(), by_name);
  std::stable_sort(cb.begin(), cb.end(), by_name);
  if (ca != cb) return false;
  auto ra = a.rules, rb = b.rules;
  std::stable_sort(ra.begin(), ra.end(), by_id);
  std::stable_sort(rb.begin(), rb.end(), by_id);
  return ra == rb;
}

std::size_t catalog_size(const KnowledgeBase& kb) noexcept { return kb.catalog.size(); }

std::size_t catalog_size(const KnowledgeBase& kb, IndicatorCategory category) noexcept {
  return static_cast<std::size_t>(
      std::count_if(kb.catalog.begin(), kb.catalog.end(),
                    [&](const Indicator& i) { return i.category == category; }));
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(IssueKind kind) noexcept {
  switch (kind) {
    case IssueKind::unknown_indicator: return "unknown_indicator";
    case IssueKind::illegal_state: return "illegal_state";
    case IssueKind::duplicate_rule_id: return "duplicate_rule_id";
    case IssueKind::duplicate_indicator: return "duplicate_indicator";
    case IssueKind::duplicate_premise: return "duplicate_premise";
    case IssueKind::cf_out_of_range: return "cf_out_of_range";
    case IssueKind::cf_precision: return "cf_precision";
    case IssueKind::empty_premises: return "empty_premises";
    case IssueKind::invalid_identifier: return "invalid_identifier";
    case IssueKind::empty_conclusion: return "empty_conclusion";
    case IssueKind::empty_legal_states: return "empty_legal_states";
    case IssueKind::missing_mitigation: return "missing_mitigation";
  }
  return "?";
}

namespace {

bool has_six_digit_precision(double v) { return std::round(v * 1e6) / 1e6 == v; }

}  // namespace

ValidationReport validate(const KnowledgeBase& kb) {
  ValidationReport report;
  auto add = [&](IssueKind kind, std::string rule_id, std::optional<std::size_t> premise,
                 std::string subject, std::string message) {
    report.push_back({kind, std::move(rule_id), premise, std::move(subject), std::move(message)});
  };

  auto is_name = [](const std::string& s) { return is_identifier(s) && normalize_name(s) == s; };

  std::set<std::string> names;
  for (const auto& ind : kb.catalog) {
    if (!is_name(ind.name)) {
      add(IssueKind::invalid_identifier, "", std::nullopt, ind.name,
          "indicator name '" + ind.name + "' is not a lowercase identifier");
    }
    for (const auto& st : ind.legal_states) {
      if (!is_name(st.value)) {
        add(IssueKind::invalid_identifier, "", std::nullopt, ind.name,
            "state '" + st.value + "' of indicator '" + ind.name +
                "' is not a lowercase identifier");
      }
    }
    if (!names.insert(ind.name).second) {
      add(IssueKind::duplicate_indicator, "", std::nullopt, ind.name,
          "indicator '" + ind.name + "' is declared more than once");
    }
    if (ind.legal_states.empty()) {
      add(IssueKind::empty_legal_states, "", std::nullopt, ind.name,
          "indicator '" + ind.name + "' has no legal states");
    }
  }

  std::set<std::string> ids;
  std::set<Severity> concluded;
  for (const auto& rule : kb.rules) {
    if (!is_identifier(rule.id)) {
      add(IssueKind::invalid_identifier, rule.id, std::nullopt, rule.id,
          "rule id '" + rule.id + "' is not an identifier");
    } else if (!ids.insert(rule.id).second) {
      add(IssueKind::duplicate_rule_id, rule.id, std::nullopt, rule.id,
          "rule id '" + rule.id + "' is used more than once");
    }
    if (rule.conclusion.statement().empty()) {
      add(IssueKind::empty_conclusion, rule.id, std::nullopt, "",
          "rule '" + rule.id + "' has an empty conclusion");
    }
    if (rule.premises.empty()) {
      add(IssueKind::empty_premises, rule.id, std::nullopt, "",
          "rule '" + rule.id + "' has no premises");
    }
    if (!in_unit_interval(rule.expert_cf)) {
      add(IssueKind::cf_out_of_range, rule.id, std::nullopt, "",
          "rule '" + rule.id + "' has CF " + std::to_string(rule.expert_cf) + " outside [0, 1]");
    } else if (!has_six_digit_precision(rule.expert_cf)) {
      add(IssueKind::cf_precision, rule.id, std::nullopt, "",
          "rule '" + rule.id + "' has CF with more than 6 fraction digits");
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < rule.premises.size(); ++i) {
      const auto& c = rule.premises[i];
      const Indicator* ind = kb.find_indicator(c.object);
      if (ind == nullptr) {
        add(IssueKind::unknown_indicator, rule.id, i, c.object,
            "unknown indicator '" + c.object + "'");
      } else if (!ind->allows(c.value)) {
        add(IssueKind::illegal_state, rule.id, i, c.value,
            "indicator '" + c.object + "' has no state '" + c.value + "'");
      }
      if (!seen.emplace(c.object, c.value).second) {
        add(IssueKind::duplicate_premise, rule.id, i, c.object,
            "premise '" + c.object + " " + c.value + "' repeated in rule '" + rule.id + "'");
      }
    }
    concluded.insert(rule.conclusion.severity());
  }

  for (Severity s : {Severity::moderate, Severity::evidence}) {
    if (!concluded.contains(s)) continue;
    auto it = kb.mitigations.find(s);
    if (it == kb.mitigations.end() || it->second.empty()) {
      add(IssueKind::missing_mitigation, "", std::nullopt, std::string(to_string(s)),
          "no mitigation text for severity '" + std::string(to_string(s)) + "'");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Editing

namespace {

ErrorCode code_for(const ValidationReport& issues) {
  for (const auto& issue : issues) {
    switch (issue.kind) {
      case IssueKind::cf_out_of_range: return ErrorCode::cf_out_of_range;
      case IssueKind::unknown_indicator: return ErrorCode::unknown_indicator;
      case IssueKind::illegal_state: return ErrorCode::illegal_state;
      default: break;
    }
  }
  return ErrorCode::invalid_kb;
}

KnowledgeBase checked(KnowledgeBase kb, std::string_view what) {
  auto issues = validate(kb);
  if (!issues.empty()) {
    const ErrorCode code = code_for(issues);
    std::string message = std::string(what) + " rejected: " + issues.front().message;
    throw KbError(code, message, std::move(issues));
  }
  return kb;
}

void normalize(Rule& rule) {
  for (auto& c : rule.premises) {
    c.object = normalize_name(c.object);
    c.value = normalize_name(c.value);
  }
}

void normalize(Indicator& ind) {
  ind.name = normalize_name(ind.name);
  for (auto& s : ind.legal_states) s.value = normalize_name(s.value);
}

}  // namespace

KnowledgeBase upsert_rule(const KnowledgeBase& kb, Rule rule) {
  normalize(rule);
  KnowledgeBase out = kb;
  auto it = std::find_if(out.rules.begin(), out.rules.end(),
                         [&](const Rule& r) { return r.id == rule.id; });
  const std::string label = "rule '" + rule.id + "'";
  if (it != out.rules.end()) {
    *it = std::move(rule);
  } else {
    out.rules.push_back(std::move(rule));
  }
  return checked(std::move(out), label);
}

KnowledgeBase delete_rule(const KnowledgeBase& kb, std::string_view id) {
  KnowledgeBase out = kb;
  auto it = std::find_if(out.rules.begin(), out.rules.end(),
                         [&](const Rule& r) { return r.id == id; });
  if (it == out.rules.end()) {
    throw KbError(ErrorCode::unknown_rule, "no rule '" + std::string(id) + "'");
  }
  out.rules.erase(it);
  return out;
}

KnowledgeBase upsert_indicator(const KnowledgeBase& kb, Indicator indicator) {
  normalize(indicator);
  KnowledgeBase out = kb;
  auto it = std::find_if(out.catalog.begin(), out.catalog.end(),
                         [&](const Indicator& i) { return i.name == indicator.name; });
  const std::string label = "indicator '" + indicator.name + "'";
  if (it != out.catalog.end()) {
    *it = std::move(indicator);
  } else {
    out.catalog.push_back(std::move(indicator));
  }
  return checked(std::move(out), label);
}

KnowledgeBase delete_indicator(const KnowledgeBase& kb, std::string_view name) {
  const std::string key = normalize_name(name);
  KnowledgeBase out = kb;
  auto it = std::find_if(out.catalog.begin(), out.catalog.end(),
                         [&](const Indicator& i) { return i.name == key; });
  if (it == out.catalog.end()) {
    throw KbError(ErrorCode::unknown_indicator, "no indicator '" + key + "'");
  }
  for (const auto& rule : kb.rules) {
    for (const auto& c : rule.premises) {
      if (c.object == key) {
        throw KbError(ErrorCode::reference_integrity,
                      "indicator '" + key + "' is referenced by rule '" + rule.id + "'");
      }
    }
  }
  out.catalog.erase(it);
  return out;
}

KnowledgeBase set_mitigation(const KnowledgeBase& kb, Severity severity, std::string text) {
  KnowledgeBase out = kb;
  out.mitigations[severity] = std::move(text);
  return checked(std::move(out), "mitigation");
}

}  // namespace dsage
