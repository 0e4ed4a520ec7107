#include "dsage/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace dsage::dsl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::lex: return "lex";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::semantic: return "semantic";
  }
  return "?";
}

std::string ParseError::format() const {
  return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
         std::string(to_string(kind)) + " error: " + message;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { ident, number, string, lbrace, rbrace, lbracket, rbracket, comma, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;  // identifier/number as written; decoded string contents
  std::size_t line = 1;
  std::size_t column = 1;
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; }

class Sink {
 public:
  Sink(std::string file, std::vector<ParseError>& errors) : file_(std::move(file)), errors_(errors) {}

  bool full() const { return errors_.size() >= kMaxErrors; }

  void add(ErrorKind kind, std::size_t line, std::size_t column, std::string message) {
    if (full()) return;
    errors_.push_back({SourceSpan{file_, line, column}, kind, std::move(message)});
  }

  SourceSpan span(std::size_t line, std::size_t column) const { return {file_, line, column}; }

 private:
  std::string file_;
  std::vector<ParseError>& errors_;
};

class Lexer {
 public:
  Lexer(std::string_view text, Sink& sink) : text_(text), sink_(sink) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (!sink_.full()) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      const std::size_t line = line_, col = col_;
      const auto c = static_cast<unsigned char>(text_[pos_]);
      Token t;
      t.line = line;
      t.column = col;
      if (ident_start(c)) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(static_cast<unsigned char>(text_[pos_]))) advance();
        t.kind = Tok::ident;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (std::isdigit(c)) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          advance();
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        }
        t.kind = Tok::number;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (c == '"') {
        if (!lex_string(t)) continue;
      } else {
        advance();
        switch (c) {
          case '{': t.kind = Tok::lbrace; break;
          case '}': t.kind = Tok::rbrace; break;
          case '[': t.kind = Tok::lbracket; break;
          case ']': t.kind = Tok::rbracket; break;
          case ',': t.kind = Tok::comma; break;
          default: {
            char buf[48];
            if (c >= 0x20 && c < 0x7f) {
              std::snprintf(buf, sizeof buf, "unexpected character '%c'", c);
            } else {
              std::snprintf(buf, sizeof buf, "unexpected byte 0x%02x", c);
            }
            sink_.add(ErrorKind::lex, line, col, buf);
            continue;
          }
        }
      }
      out.push_back(std::move(t));
    }
    Token eof;
    eof.kind = Tok::eof;
    eof.line = line_;
    eof.column = col_;
    out.push_back(eof);
    return out;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  // Returns false (after reporting) for an unterminated string.
  bool lex_string(Token& t) {
    advance();  // opening quote
    t.kind = Tok::string;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        return true;
      }
      if (c == '\n') break;
      if (c == '\\') {
        const std::size_t el = line_, ec = col_;
        advance();
        if (pos_ >= text_.size() || text_[pos_] == '\n') break;
        const char e = text_[pos_];
        advance();
        switch (e) {
          case 'n': t.text.push_back('\n'); break;
          case 't': t.text.push_back('\t'); break;
          case 'r': t.text.push_back('\r'); break;
          case '"': t.text.push_back('"'); break;
          case '\\': t.text.push_back('\\'); break;
          case 'x': {
            int hi = pos_ < text_.size() ? hex_value(text_[pos_]) : -1;
            int lo = pos_ + 1 < text_.size() ? hex_value(text_[pos_ + 1]) : -1;
            if (hi < 0 || lo < 0) {
              sink_.add(ErrorKind::lex, el, ec, "malformed \\x escape");
              break;
            }
            advance();
            advance();
            t.text.push_back(static_cast<char>(hi * 16 + lo));
            break;
          }
          default: sink_.add(ErrorKind::lex, el, ec, "unknown escape sequence"); break;
        }
        continue;
      }
      t.text.push_back(c);
      advance();
    }
    sink_.add(ErrorKind::lex, t.line, t.column, "unterminated string");
    return false;
  }

  std::string_view text_;
  Sink& sink_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

bool keyword_eq(const Token& t, std::string_view kw) {
  if (t.kind != Tok::ident || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  }
  return true;
}

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::ident: return "'" + t.text + "'";
    case Tok::number: return "number " + t.text;
    case Tok::string: return "string";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::eof: return "end of file";
  }
  return "token";
}

struct Spans {
  std::vector<SourceSpan> indicators;
  std::vector<SourceSpan> rules;
  std::vector<std::vector<SourceSpan>> premises;
  std::vector<SourceSpan> cfs;
};

struct SyntaxFailure {};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Sink& sink) : toks_(std::move(tokens)), sink_(sink) {}

  void run() {
    if (peek().kind == Tok::eof) return;
    if (keyword_eq(peek(), "kbformat")) {
      try {
        parse_header();
      } catch (const SyntaxFailure&) {
        sync_top();
      }
    } else {
      error_at(peek(), "missing 'kbformat' header");
    }
    while (peek().kind != Tok::eof && !sink_.full()) {
      const Token& t = peek();
      try {
        if (keyword_eq(t, "indicator")) {
          parse_indicator();
        } else if (keyword_eq(t, "rule")) {
          parse_rule();
        } else if (keyword_eq(t, "mitigation")) {
          parse_mitigation();
        } else if (keyword_eq(t, "assert")) {
          error_at(t, "'assert' is reserved and not supported");
          next();
          sync_top();
        } else if (keyword_eq(t, "kbformat")) {
          error_at(t, "duplicate 'kbformat' header");
          next();
          if (peek().kind == Tok::number) next();
        } else {
          error_at(t, "expected 'indicator', 'rule' or 'mitigation', found " + describe(t));
          next();
          sync_top();
        }
      } catch (const SyntaxFailure&) {
        sync_top();
      }
    }
  }

  KnowledgeBase kb;
  Spans spans;
  bool syntax_failed = false;

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  void error_at(const Token& t, std::string message) {
    syntax_failed = true;
    sink_.add(ErrorKind::syntax, t.line, t.column, std::move(message));
  }

  [[noreturn]] void fail(const Token& t, std::string message) {
    error_at(t, std::move(message));
    throw SyntaxFailure{};
  }

  bool at_top_keyword() const {
    const Token& t = peek();
    return keyword_eq(t, "indicator") || keyword_eq(t, "rule") || keyword_eq(t, "mitigation") ||
           keyword_eq(t, "kbformat");
  }

  void sync_top() {
    while (peek().kind != Tok::eof && !at_top_keyword()) next();
  }

  // Inside a rule body: skip to the closing brace, or stop at the next
  // top-level keyword if the brace is missing.
  void sync_rule() {
    while (peek().kind != Tok::eof) {
      if (peek().kind == Tok::rbrace) {
        next();
        return;
      }
      if (keyword_eq(peek(), "rule") || keyword_eq(peek(), "indicator") ||
          keyword_eq(peek(), "mitigation")) {
        return;
      }
      next();
    }
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!keyword_eq(peek(), kw)) {
      fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    }
    return next();
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    }
    return next();
  }

  std::string expect_ident(std::string_view what) {
    return normalize_name(expect(Tok::ident, what).text);
  }

  Verb expect_verb() {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      if (auto v = parse_verb(lowered(t.text))) {
        next();
        return *v;
      }
    }
    fail(t, "expected one of is/shows/appears/are, found " + describe(t));
  }

  void parse_header() {
    next();
    const Token& v = expect(Tok::number, "format version");
    int version = -1;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), version);
    if (ec != std::errc() || p != v.text.data() + v.text.size() || version != kFormatVersion) {
      sink_.add(ErrorKind::semantic, v.line, v.column,
                "unsupported kbformat version " + v.text + " (expected " +
                    std::to_string(kFormatVersion) + ")");
      syntax_failed = true;
    }
  }

  void parse_indicator() {
    const Token& head = next();
    Indicator ind;
    ind.name = expect_ident("indicator name");
    expect_keyword("category");
    const Token& cat = expect(Tok::ident, "category");
    auto category = parse_category(lowered(cat.text));
    if (!category) fail(cat, "unknown category '" + cat.text + "'");
    ind.category = *category;
    expect_keyword("states");
    expect(Tok::lbracket, "'['");
    do {
      State s;
      s.verb = expect_verb();
      s.value = expect_ident("state value");
      ind.legal_states.push_back(std::move(s));
    } while (peek().kind == Tok::comma && (next(), true));
    expect(Tok::rbracket, "']'");
    if (keyword_eq(peek(), "alias")) {
      next();
      ind.alias = expect(Tok::string, "alias string").text;
    }
    spans.indicators.push_back(sink_.span(head.line, head.column));
    kb.catalog.push_back(std::move(ind));
  }

  double parse_cf_literal(const Token& t) {
    const auto dot = t.text.find('.');
    if (dot != std::string::npos && t.text.size() - dot - 1 > 6) {
      fail(t, "CF literal " + t.text + " has more than 6 fraction digits");
    }
    double value = 0.0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) {
      fail(t, "malformed CF literal " + t.text);
    }
    return value;
  }

  void parse_rule() {
    const Token& head = next();
    Rule rule;
    try {
      rule.id = expect(Tok::ident, "rule id").text;
      expect(Tok::lbrace, "'{'");
      if (keyword_eq(peek(), "then")) fail(head, "rule '" + rule.id + "' has no premises");

      std::vector<SourceSpan> premise_spans;
      std::optional<Connective> connective;
      bool first = true;
      while (keyword_eq(peek(), "if") || keyword_eq(peek(), "and") || keyword_eq(peek(), "or")) {
        const Token& kw = next();
        if (first && !keyword_eq(kw, "if")) fail(kw, "first premise must start with 'if'");
        if (!first) {
          if (keyword_eq(kw, "if")) fail(kw, "'if' may only start the first premise");
          const Connective c = keyword_eq(kw, "and") ? Connective::all_of : Connective::any_of;
          if (connective && *connective != c) {
            fail(kw, "rule '" + rule.id + "' mixes 'and' with 'or'");
          }
          connective = c;
        }
        first = false;
        Condition cond;
        cond.object = expect_ident("indicator name");
        cond.verb = expect_verb();
        cond.value = expect_ident("state value");
        rule.premises.push_back(std::move(cond));
        premise_spans.push_back(sink_.span(kw.line, kw.column));
      }
      if (rule.premises.empty()) {
        fail(peek(), "expected premise starting with 'if', found " + describe(peek()));
      }
      if (keyword_eq(peek(), "connective")) {
        next();
        const Token& c = expect(Tok::ident, "'and' or 'or'");
        auto declared = parse_connective(lowered(c.text));
        if (!declared) fail(c, "expected 'and' or 'or', found " + describe(c));
        if (connective && *connective != *declared) {
          fail(c, "declared connective contradicts the premises");
        }
        connective = declared;
      }
      rule.connective = connective.value_or(Connective::all_of);

      expect_keyword("then");
      std::string statement = expect(Tok::string, "conclusion string").text;
      std::optional<Season> season;
      if (keyword_eq(peek(), "season")) {
        next();
        const Token& s = expect(Tok::ident, "season");
        season = parse_season(lowered(s.text));
        if (!season) fail(s, "unknown season '" + s.text + "'");
      }
      rule.conclusion = Hypothesis(statement, season);

      expect_keyword("cf");
      const Token& cf_tok = expect(Tok::number, "CF value");
      rule.expert_cf = parse_cf_literal(cf_tok);
      if (keyword_eq(peek(), "kind")) {
        next();
        const Token& k = expect(Tok::ident, "knowledge kind");
        auto kind = parse_knowledge_kind(lowered(k.text));
        if (!kind) fail(k, "unknown knowledge kind '" + k.text + "'");
        rule.kind = *kind;
      }
      expect(Tok::rbrace, "'}'");

      spans.rules.push_back(sink_.span(head.line, head.column));
      spans.premises.push_back(std::move(premise_spans));
      spans.cfs.push_back(sink_.span(cf_tok.line, cf_tok.column));
      kb.rules.push_back(std::move(rule));
    } catch (const SyntaxFailure&) {
      sync_rule();
    }
  }

  void parse_mitigation() {
    const Token& head = next();
    const Token& sev = expect(Tok::ident, "severity");
    auto severity = parse_severity(lowered(sev.text));
    if (!severity) fail(sev, "unknown severity '" + sev.text + "'");
    std::string text = expect(Tok::string, "mitigation text").text;
    if (kb.mitigations.contains(*severity)) {
      sink_.add(ErrorKind::semantic, head.line, head.column,
                "duplicate mitigation for severity '" + lowered(sev.text) + "'");
      syntax_failed = true;
      return;
    }
    kb.mitigations.emplace(*severity, std::move(text));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Sink& sink_;
};

SourceSpan span_for(const ValidationIssue& issue, const KnowledgeBase& kb, const Spans& spans,
                    const SourceSpan& fallback) {
  if (!issue.rule_id.empty() || issue.premise) {
    for (std::size_t i = 0; i < kb.rules.size(); ++i) {
      if (kb.rules[i].id != issue.rule_id) continue;
      if (issue.premise && *issue.premise < spans.premises[i].size()) {
        return spans.premises[i][*issue.premise];
      }
      if (issue.kind == IssueKind::cf_out_of_range || issue.kind == IssueKind::cf_precision) {
        return spans.cfs[i];
      }
      // Duplicate ids point at the later declaration.
      if (issue.kind == IssueKind::duplicate_rule_id) {
        for (std::size_t j = kb.rules.size(); j-- > i + 1;) {
          if (kb.rules[j].id == issue.rule_id) return spans.rules[j];
        }
      }
      return spans.rules[i];
    }
  }
  if (issue.kind == IssueKind::missing_mitigation) {
    for (std::size_t i = 0; i < kb.rules.size(); ++i) {
      if (to_string(kb.rules[i].conclusion.severity()) == issue.subject) return spans.rules[i];
    }
  }
  if (!issue.subject.empty()) {
    std::size_t found = kb.catalog.size();
    for (std::size_t i = 0; i < kb.catalog.size(); ++i) {
      if (kb.catalog[i].name == issue.subject) found = i;  // last, for duplicates
    }
    if (found < kb.catalog.size()) return spans.indicators[found];
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// Serializer helpers

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace

ParseResult parse_kb(std::string_view text, std::string_view file_name) {
  ParseResult result;
  Sink sink(std::string(file_name), result.errors);
  Lexer lexer(text, sink);
  auto tokens = lexer.run();
  const SourceSpan eof_span = sink.span(tokens.back().line, tokens.back().column);

  Parser parser(std::move(tokens), sink);
  parser.run();

  if (result.errors.empty() && !parser.syntax_failed) {
    for (const auto& issue : validate(parser.kb)) {
      const SourceSpan s = span_for(issue, parser.kb, parser.spans, eof_span);
      sink.add(ErrorKind::semantic, s.line, s.column, issue.message);
    }
  }
  if (result.errors.empty()) result.kb = std::move(parser.kb);
  return result;
}

std::string format_cf(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string serialize_kb(const KnowledgeBase& kb) {
  std::string out = "kbformat " + std::to_string(kFormatVersion) + "\n";

  std::vector<const Indicator*> catalog;
  for (const auto& ind : kb.catalog) catalog.push_back(&ind);
  std::stable_sort(catalog.begin(), catalog.end(), [](const Indicator* a, const Indicator* b) {
    if (a->category != b->category) return a->category < b->category;
    return a->name < b->name;
  });
  std::optional<IndicatorCategory> group;
  for (const Indicator* ind : catalog) {
    if (group != ind->category) {
      out += "\n";
      group = ind->category;
    }
    out += "indicator " + ind->name + " category " + std::string(to_string(ind->category)) +
           " states [";
    for (std::size_t i = 0; i < ind->legal_states.size(); ++i) {
      if (i) out += ", ";
      out += std::string(to_string(ind->legal_states[i].verb)) + " " + ind->legal_states[i].value;
    }
    out += "]";
    if (ind->alias) out += " alias " + quote(*ind->alias);
    out += "\n";
  }

  for (const Rule* rule : kb.rules_by_id()) {
    out += "\nrule " + rule->id + " {\n";
    for (std::size_t i = 0; i < rule->premises.size(); ++i) {
      const auto& c = rule->premises[i];
      const std::string_view kw = i == 0 ? "if" : to_string(rule->connective);
      out += "  " + std::string(kw) + " " + c.object + " " + std::string(to_string(c.verb)) + " " +
             c.value + "\n";
    }
    if (rule->premises.size() == 1 && rule->connective == Connective::any_of) {
      out += "  connective or\n";
    }
    out += "  then " + quote(rule->conclusion.statement());
    if (rule->conclusion.season()) {
      out += " season " + std::string(to_string(*rule->conclusion.season()));
    }
    out += " cf " + format_cf(rule->expert_cf);
    if (rule->kind != KnowledgeKind::derivation) {
      out += " kind " + std::string(to_string(rule->kind));
    }
    out += "\n}\n";
  }

  if (!kb.mitigations.empty()) out += "\n";
  for (const auto& [severity, text] : kb.mitigations) {
    out += "mitigation " + std::string(to_string(severity)) + " " + quote(text) + "\n";
  }
  return out;
}

}  // namespace dsage::dsl
