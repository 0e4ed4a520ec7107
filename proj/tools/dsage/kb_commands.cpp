#include <iostream>
#include <memory>

#include "common.hpp"
#include "dsage/dsl.hpp"

namespace dsage::cli {

namespace {

struct KbOptions {
  std::string file;
  bool check = false;
  bool to_stdout = false;

  std::string rule_id;
  std::vector<std::string> premises;
  bool any_of = false;
  std::string then;
  std::string season;
  double cf = -1.0;
  std::string kind = "derivation";
};

void run_validate(const KbOptions& o) {
  const KnowledgeBase kb = load_kb_file(o.file, std::cout);
  std::cout << catalog_size(kb) << " indicators, " << kb.rules.size() << " rules\n";
}

void run_fmt(const KbOptions& o) {
  const std::string before = read_text(o.file);
  const KnowledgeBase kb = load_kb_file(o.file, std::cerr);
  const std::string after = dsl::serialize_kb(kb);
  if (o.to_stdout) {
    std::cout << after;
    return;
  }
  if (o.check) {
    if (before != after) throw Failure{ExitStatus::invalid, o.file + " is not canonically formatted"};
    return;
  }
  if (before != after) write_text(o.file, after);
}

void run_list(const KbOptions& o) {
  const KnowledgeBase kb = load_kb_file(o.file, std::cerr);
  for (const Rule* r : kb.rules_by_id()) {
    std::cout << r->id << "\t" << dsl::format_cf(r->expert_cf) << "\t"
              << r->conclusion.display() << "\t";
    for (std::size_t i = 0; i < r->premises.size(); ++i) {
      if (i) std::cout << ' ' << to_string(r->connective) << ' ';
      const auto& c = r->premises[i];
      std::cout << c.object << ' ' << to_string(c.verb) << ' ' << c.value;
    }
    std::cout << "\n";
  }
}

void run_add_rule(const KbOptions& o) {
  const KnowledgeBase kb = load_kb_file(o.file, std::cerr);
  Rule rule;
  rule.id = o.rule_id;
  for (const auto& p : o.premises) rule.premises.push_back(parse_condition_text(p));
  rule.connective = o.any_of ? Connective::any_of : Connective::all_of;
  std::optional<Season> season;
  if (!o.season.empty()) {
    season = parse_season(o.season);
    if (!season) throw Failure{ExitStatus::usage, "unknown season '" + o.season + "'"};
  }
  rule.conclusion = Hypothesis(o.then, season);
  rule.expert_cf = o.cf;
  auto kind = parse_knowledge_kind(o.kind);
  if (!kind) throw Failure{ExitStatus::usage, "unknown knowledge kind '" + o.kind + "'"};
  rule.kind = *kind;
  try {
    write_text(o.file, dsl::serialize_kb(upsert_rule(kb, std::move(rule))));
  } catch (const KbError& e) {
    for (const auto& issue : e.issues()) std::cout << to_string(issue.kind) << ": " << issue.message << "\n";
    throw Failure{ExitStatus::invalid, e.what()};
  }
}

void run_del_rule(const KbOptions& o) {
  const KnowledgeBase kb = load_kb_file(o.file, std::cerr);
  try {
    write_text(o.file, dsl::serialize_kb(delete_rule(kb, o.rule_id)));
  } catch (const KbError& e) {
    throw Failure{ExitStatus::invalid, e.what()};
  }
}

}  // namespace

void register_kb_commands(CLI::App& app) {
  auto opts = std::make_shared<KbOptions>();
  auto* kb = app.add_subcommand("kb", "Knowledge-base editor");
  kb->require_subcommand(1);

  auto* validate = kb->add_subcommand("validate", "Parse and validate a .dkb file");
  validate->add_option("file", opts->file, "Knowledge base")->required();
  validate->callback([opts] { run_validate(*opts); });

  auto* fmt = kb->add_subcommand("fmt", "Rewrite a .dkb file in canonical form");
  fmt->add_option("file", opts->file, "Knowledge base")->required();
  fmt->add_flag("--check", opts->check, "Exit 1 if the file is not canonical; do not write");
  fmt->add_flag("--stdout", opts->to_stdout, "Print the canonical form instead of writing");
  fmt->callback([opts] { run_fmt(*opts); });

  auto* list = kb->add_subcommand("list", "List rules");
  list->add_option("file", opts->file, "Knowledge base")->required();
  list->callback([opts] { run_list(*opts); });

  auto* add = kb->add_subcommand("add-rule", "Add or replace a rule");
  add->add_option("file", opts->file, "Knowledge base")->required();
  add->add_option("--id", opts->rule_id, "Rule id, e.g. RC99")->required();
  add->add_option("--if", opts->premises, "Premise '<object> <verb> <value>' (repeatable)")
      ->required();
  add->add_flag("--or", opts->any_of, "Join premises with OR instead of AND");
  add->add_option("--then", opts->then, "Conclusion statement")->required();
  add->add_option("--season", opts->season, "spring|summer|autumn|winter|unspecified");
  add->add_option("--cf", opts->cf, "Expert certainty factor in [0, 1]")->required();
  add->add_option("--kind", opts->kind, "derivation|factual|control");
  add->callback([opts] { run_add_rule(*opts); });

  auto* del = kb->add_subcommand("del-rule", "Delete a rule");
  del->add_option("file", opts->file, "Knowledge base")->required();
  del->add_option("id", opts->rule_id, "Rule id")->required();
  del->callback([opts] { run_del_rule(*opts); });
}

}  // namespace dsage::cli
