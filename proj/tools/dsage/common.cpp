#include "common.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "dsage/dsl.hpp"

namespace dsage::cli {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{ExitStatus::io, "cannot read " + path.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{ExitStatus::io, "cannot write " + tmp.string()};
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Failure{ExitStatus::io, "short write to " + tmp.string()};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Failure{ExitStatus::io, "cannot replace " + path.string()};
}

KnowledgeBase load_kb_file(const std::filesystem::path& path, std::ostream& diag) {
  const std::string text = read_text(path);
  auto parsed = dsl::parse_kb(text, path.string());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) diag << e.format() << "\n";
    throw Failure{ExitStatus::invalid, ""};
  }
  return std::move(*parsed.kb);
}

namespace {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& w, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += w[i];
  }
  return normalize_name(out);
}

std::optional<double> number(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Split {
  Condition condition;
  std::optional<double> cf;
};

Split split_condition(std::string_view text, bool allow_cf) {
  const auto w = words(text);
  std::size_t verb_at = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (parse_verb(w[i])) {
      verb_at = i;
      break;
    }
  }
  if (verb_at == 0) {
    throw Failure{ExitStatus::usage,
                  "expected '<object> <is|shows|appears|are> <value>', got '" + std::string(text) + "'"};
  }
  std::size_t end = w.size();
  Split out;
  if (allow_cf && end > verb_at + 2) {
    if (auto cf = number(w.back())) {
      out.cf = cf;
      --end;
    }
  }
  if (end <= verb_at + 1) {
    throw Failure{ExitStatus::usage, "missing value in '" + std::string(text) + "'"};
  }
  out.condition = {join(w, 0, verb_at), *parse_verb(w[verb_at]), join(w, verb_at + 1, end)};
  return out;
}

}  // namespace

Observation parse_observation_text(std::string_view text) {
  Split s = split_condition(text, true);
  Observation obs;
  obs.condition = std::move(s.condition);
  if (s.cf) {
    auto cf = CertaintyFactor::try_make(*s.cf);
    if (!cf) throw Failure{ExitStatus::usage, "CF must lie in [0, 1] in '" + std::string(text) + "'"};
    obs.cf = *cf;
    obs.source = ObservationSource::user;
  } else {
    obs.cf = CertaintyFactor(1.0);
    obs.source = ObservationSource::default_cf;
  }
  return obs;
}

Condition parse_condition_text(std::string_view text) {
  return split_condition(text, false).condition;
}

}  // namespace dsage::cli
