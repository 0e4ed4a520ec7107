#include <iostream>
#include <memory>

#include "common.hpp"
#include "dsage/error.hpp"
#include "dsage/service/json.hpp"
#include "dsage/session.hpp"
#include "dsage/store.hpp"

namespace dsage::cli {

namespace {

struct ConsultOptions {
  std::string kb_file;
  std::vector<std::string> observations;
  bool json = false;
  bool interactive = false;
};

std::optional<std::size_t> ask_choice(std::istream& in, std::ostream& out, const std::string& prompt,
                                      std::size_t count) {
  for (;;) {
    out << prompt << " [1-" << count << ", blank to finish]: " << std::flush;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    if (line.find_first_not_of(" \t\r") == std::string::npos) return std::nullopt;
    try {
      const std::size_t n = std::stoul(line);
      if (n >= 1 && n <= count) return n - 1;
    } catch (const std::exception&) {
    }
    out << "  please enter a number between 1 and " << count << "\n";
  }
}

// Category -> indicator -> state -> CF, repeated until a blank answer.
std::vector<Observation> interview(const KnowledgeBase& kb, std::istream& in, std::ostream& out) {
  static constexpr IndicatorCategory categories[] = {
      IndicatorCategory::animal, IndicatorCategory::plant, IndicatorCategory::meteorological,
      IndicatorCategory::astronomical};
  std::vector<Observation> picked;
  for (;;) {
    out << "\nIndicator categories:\n";
    for (std::size_t i = 0; i < std::size(categories); ++i) {
      out << "  " << i + 1 << ") " << to_string(categories[i]) << "\n";
    }
    auto cat = ask_choice(in, out, "Category", std::size(categories));
    if (!cat) break;

    std::vector<const Indicator*> inds;
    for (const auto& ind : kb.catalog) {
      if (ind.category == categories[*cat]) inds.push_back(&ind);
    }
    if (inds.empty()) continue;
    for (std::size_t i = 0; i < inds.size(); ++i) {
      out << "  " << i + 1 << ") " << inds[i]->display_name() << "\n";
    }
    auto ind = ask_choice(in, out, "Indicator", inds.size());
    if (!ind) continue;

    const auto& states = inds[*ind]->legal_states;
    for (std::size_t i = 0; i < states.size(); ++i) {
      out << "  " << i + 1 << ") " << to_string(states[i].verb) << " " << states[i].value << "\n";
    }
    auto st = ask_choice(in, out, "State", states.size());
    if (!st) continue;

    Observation obs;
    obs.condition = {inds[*ind]->name, states[*st].verb, states[*st].value};
    obs.cf = CertaintyFactor(1.0);
    obs.source = ObservationSource::default_cf;
    for (;;) {
      out << "Confidence [0-1, blank for 1.0]: " << std::flush;
      std::string line;
      if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) break;
      try {
        if (auto cf = CertaintyFactor::try_make(std::stod(line))) {
          obs.cf = *cf;
          obs.source = ObservationSource::user;
          break;
        }
      } catch (const std::exception&) {
      }
      out << "  please enter a number between 0 and 1\n";
    }
    picked.push_back(std::move(obs));
  }
  return picked;
}

void print_text(const Consultation& c) {
  if (c.advisories.empty()) {
    std::cout << "no applicable rules\n";
    return;
  }
  for (const auto& a : c.advisories) {
    std::cout << a.rank << ". " << a.hypothesis.display() << " — " << a.cf_percent << "%";
    if (a.mitigation) std::cout << "  [mitigation: " << *a.mitigation << "]";
    std::cout << "\n";
  }
}

void run_consult(const ConsultOptions& o) {
  const KnowledgeBase kb = load_kb_file(o.kb_file, std::cerr);

  std::vector<Observation> observations;
  for (const auto& text : o.observations) observations.push_back(parse_observation_text(text));
  if (o.interactive) {
    auto more = interview(kb, std::cin, std::cerr);
    observations.insert(observations.end(), more.begin(), more.end());
  }

  // Local, unsaved session: fixed id and timestamp keep output reproducible.
  Session session;
  session.id = "local";
  session.kb_version = kb_digest(kb);
  try {
    session = replace_observations(std::move(session), kb, observations);
  } catch (const Error& e) {
    throw Failure{ExitStatus::invalid, e.what()};
  }
  const Consultation c = advise(std::move(session), kb);

  if (!o.json) {
    for (const auto& w : c.session.last_result->warnings) {
      std::cerr << "warning: contradictory observations for " << w.object << ":";
      for (const auto& v : w.values) std::cerr << " " << v;
      std::cerr << "\n";
    }
    print_text(c);
    return;
  }
  api::Json body = api::consultation_to_json(c);
  body.erase("session");
  api::Json obs = api::Json::array();
  for (const auto& [key, o2] : c.session.wm) obs.push_back(api::to_json(o2));
  body["observations"] = std::move(obs);
  std::cout << api::dump_fixed(body, 2) << "\n";
}

}  // namespace

void register_consult_command(CLI::App& app) {
  auto opts = std::make_shared<ConsultOptions>();
  auto* cmd = app.add_subcommand("consult", "Run a consultation and print ranked advisories");
  cmd->add_option("--kb", opts->kb_file, "Knowledge base (.dkb)")->required();
  cmd->add_option("--observe", opts->observations,
                  "Observation '<object> <verb> <value> [cf]' (repeatable)");
  cmd->add_flag("--json", opts->json, "Emit the machine-readable result");
  cmd->add_flag("--interactive", opts->interactive, "Ask for observations on the terminal");
  cmd->callback([opts] { run_consult(*opts); });
}

}  // namespace dsage::cli
