#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsage/error.hpp"

namespace dsage {

// Trim, lowercase, and collapse whitespace runs into a single underscore.
// Idempotent.
std::string normalize_name(std::string_view raw);

// [A-Za-z_][A-Za-z0-9_-]*
bool is_identifier(std::string_view s) noexcept;

enum class IndicatorCategory { animal, plant, meteorological, astronomical };

// Observation verbs. All four mean "has state" when matching; the verb is
// kept only so text round-trips the way the expert wrote it.
enum class Verb { is, shows, appears, are };

enum class Connective { all_of, any_of };

enum class Severity { none, moderate, evidence };

enum class Season { spring, summer, autumn, winter, unspecified };

enum class KnowledgeKind { derivation, factual, control };

std::string_view to_string(IndicatorCategory v) noexcept;
std::string_view to_string(Verb v) noexcept;
std::string_view to_string(Connective v) noexcept;
std::string_view to_string(Severity v) noexcept;
std::string_view to_string(Season v) noexcept;
std::string_view to_string(KnowledgeKind v) noexcept;

std::optional<IndicatorCategory> parse_category(std::string_view s) noexcept;
std::optional<Verb> parse_verb(std::string_view s) noexcept;
std::optional<Connective> parse_connective(std::string_view s) noexcept;
std::optional<Severity> parse_severity(std::string_view s) noexcept;
std::optional<Season> parse_season(std::string_view s) noexcept;
std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s) noexcept;

struct State {
  Verb verb = Verb::is;
  std::string value;

  bool operator==(const State&) const = default;
};

struct Indicator {
  std::string name;
  IndicatorCategory category = IndicatorCategory::animal;
  std::vector<State> legal_states;
  std::optional<std::string> alias;

  const std::string& display_name() const { return alias ? *alias : name; }
  bool allows(std::string_view value) const;

  bool operator==(const Indicator&) const = default;
};

struct Condition {
  std::string object;
  Verb verb = Verb::is;
  std::string value;

  bool operator==(const Condition&) const = default;
};

// A conclusion. The statement is canonicalized (whitespace collapsed,
// sentence case) and the severity is derived from it, so two rules written
// as "no evidence of drought" and "No evidence of drought" share a score.
class Hypothesis {
 public:
  Hypothesis() = default;
  explicit Hypothesis(std::string_view statement,
                      std::optional<Season> season = std::nullopt);

  const std::string& statement() const noexcept { return statement_; }
  Severity severity() const noexcept { return severity_; }
  const std::optional<Season>& season() const noexcept { return season_; }

  // "No evidence of drought, onset of spring"
  std::string display() const;

  friend bool operator==(const Hypothesis& a, const Hypothesis& b) {
    return a.statement_ == b.statement_ && a.season_ == b.season_;
  }
  friend bool operator<(const Hypothesis& a, const Hypothesis& b);

 private:
  std::string statement_;
  Severity severity_ = Severity::none;
  std::optional<Season> season_;
};

std::string canonical_statement(std::string_view raw);
Severity severity_of(std::string_view canonical);

struct Rule {
  std::string id;
  std::vector<Condition> premises;
  Connective connective = Connective::all_of;
  Hypothesis conclusion;
  // Kept as a raw double so an out-of-range value can be represented and
  // reported by validate(); the engine converts it on use.
  double expert_cf = 0.0;
  KnowledgeKind kind = KnowledgeKind::derivation;

  bool operator==(const Rule&) const = default;
};

// Natural order on rule ids: digit runs compare numerically, so RC2 < RC10.
struct RuleIdLess {
  bool operator()(std::string_view a, std::string_view b) const noexcept;
};

class KnowledgeBase {
 public:
  std::vector<Indicator> catalog;
  std::vector<Rule> rules;
  std::map<Severity, std::string> mitigations;

  const Indicator* find_indicator(std::string_view name) const noexcept;
  const Rule* find_rule(std::string_view id) const noexcept;

  // Rules in ascending id order, independent of storage order.
  std::vector<const Rule*> rules_by_id() const;

  // Structural equality, insensitive to storage order of catalog and rules.
  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);
};

std::size_t catalog_size(const KnowledgeBase& kb) noexcept;
std::size_t catalog_size(const KnowledgeBase& kb, IndicatorCategory category) noexcept;

enum class IssueKind {
  unknown_indicator,
  illegal_state,
  duplicate_rule_id,
  duplicate_indicator,
  duplicate_premise,
  cf_out_of_range,
  cf_precision,
  empty_premises,
  invalid_identifier,
  empty_conclusion,
  empty_legal_states,
  missing_mitigation,
};

std::string_view to_string(IssueKind kind) noexcept;

struct ValidationIssue {
  IssueKind kind;
  std::string rule_id;                  // empty for catalog-level issues
  std::optional<std::size_t> premise;   // 0-based premise position
  std::string subject;                  // indicator name, state, etc.
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

using ValidationReport = std::vector<ValidationIssue>;

ValidationReport validate(const KnowledgeBase& kb);

// Thrown by the editing operations when the edit would leave the KB invalid.
class KbError : public Error {
 public:
  KbError(ErrorCode code, const std::string& message, ValidationReport issues = {})
      : Error(code, message), issues_(std::move(issues)) {}

  const ValidationReport& issues() const noexcept { return issues_; }

 private:
  ValidationReport issues_;
};

// Editing. Each returns a new KB and throws KbError if the result would not
// validate; the input is left untouched.
KnowledgeBase upsert_rule(const KnowledgeBase& kb, Rule rule);
KnowledgeBase delete_rule(const KnowledgeBase& kb, std::string_view id);
KnowledgeBase upsert_indicator(const KnowledgeBase& kb, Indicator indicator);
KnowledgeBase delete_indicator(const KnowledgeBase& kb, std::string_view name);
KnowledgeBase set_mitigation(const KnowledgeBase& kb, Severity severity, std::string text);

}  // namespace dsage
