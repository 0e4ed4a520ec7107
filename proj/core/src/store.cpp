#include "dsage/store.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "dsage/dsl.hpp"
#include "dsage/error.hpp"

namespace dsage {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorCode::io_error, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string kb_digest(const KnowledgeBase& kb) { return sha256_hex(dsl::serialize_kb(kb)); }

// ---------------------------------------------------------------------------
// Session records

namespace {

constexpr std::string_view kSessionMagic = "dsage-session 1";

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

[[noreturn]] void bad_record(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::parse_error, "session record line " + std::to_string(line) + ": " + why);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_hex(std::string_view s, std::size_t len) {
  return s.size() == len && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

std::string serialize_session(const Session& session) {
  std::string out(kSessionMagic);
  out += "\nid " + session.id;
  out += "\ncreated_at " + format_timestamp(session.created_at);
  out += "\nkb_version " + session.kb_version;
  for (const auto& [key, obs] : session.wm) {
    out += "\nobservation " + obs.condition.object + " " +
           std::string(to_string(obs.condition.verb)) + " " + obs.condition.value + " " +
           format_double(obs.cf.value()) + " " + std::string(to_string(obs.source));
  }
  if (session.last_result) out += "\nresult current";
  out += "\n";
  return out;
}

SessionRecord parse_session(std::string_view text) {
  SessionRecord rec;
  bool have_id = false, have_created = false, have_version = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (first) {
      if (line != kSessionMagic) bad_record(line_no, "missing 'dsage-session 1' header");
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_ws(line);
    const std::string_view key = fields.front();
    if (key == "id" && fields.size() == 2) {
      rec.session.id = std::string(fields[1]);
      have_id = true;
    } else if (key == "created_at" && fields.size() == 2) {
      auto ts = parse_timestamp(fields[1]);
      if (!ts) bad_record(line_no, "bad timestamp");
      rec.session.created_at = *ts;
      have_created = true;
    } else if (key == "kb_version" && fields.size() == 2) {
      rec.session.kb_version = std::string(fields[1]);
      have_version = true;
    } else if (key == "observation" && fields.size() == 6) {
      Observation obs;
      obs.condition.object = std::string(fields[1]);
      auto verb = parse_verb(fields[2]);
      if (!verb) bad_record(line_no, "bad verb");
      obs.condition.verb = *verb;
      obs.condition.value = std::string(fields[3]);
      double cf = 0.0;
      auto [p, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), cf);
      if (ec != std::errc() || p != fields[4].data() + fields[4].size()) {
        bad_record(line_no, "bad CF");
      }
      auto checked = CertaintyFactor::try_make(cf);
      if (!checked) bad_record(line_no, "CF outside [0, 1]");
      obs.cf = *checked;
      if (fields[5] == "user") {
        obs.source = ObservationSource::user;
      } else if (fields[5] == "default") {
        obs.source = ObservationSource::default_cf;
      } else {
        bad_record(line_no, "bad observation source");
      }
      rec.session.wm.put(std::move(obs));
    } else if (key == "result" && fields.size() == 2 && fields[1] == "current") {
      rec.result_current = true;
    } else {
      bad_record(line_no, "unrecognized field '" + std::string(key) + "'");
    }
  }
  if (first) bad_record(1, "empty record");
  if (!have_id || !have_created || !have_version) {
    bad_record(line_no, "record lacks id, created_at or kb_version");
  }
  return rec;
}

// ---------------------------------------------------------------------------
// FileStore

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp-" + new_session_id().substr(0, 8);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io_error, "cannot rename into " + path.string());
  }
}

void check_digest_syntax(const std::string& digest) {
  if (!is_hex(digest, 64)) {
    throw Error(ErrorCode::missing_snapshot, "'" + digest + "' is not a KB digest");
  }
}

void check_session_syntax(const std::string& id) {
  if (!is_hex(id, 32)) throw Error(ErrorCode::unknown_session, "no session '" + id + "'");
}

}  // namespace

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "kb", ec);
  if (!ec) fs::create_directories(root_ / "sessions", ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create store at " + root_.string());
}

fs::path FileStore::kb_path(const std::string& digest) const {
  return root_ / "kb" / (digest + ".dkb");
}

fs::path FileStore::session_path(const std::string& id) const {
  return root_ / "sessions" / (id + ".session");
}

std::string FileStore::put_kb(const KnowledgeBase& kb) {
  if (auto issues = validate(kb); !issues.empty()) {
    throw KbError(ErrorCode::invalid_kb, "refusing to store invalid KB: " + issues.front().message,
                  std::move(issues));
  }
  const std::string text = dsl::serialize_kb(kb);
  const std::string digest = sha256_hex(text);
  if (!fs::exists(kb_path(digest))) write_atomic(kb_path(digest), text);
  return digest;
}

bool FileStore::has_kb(const std::string& digest) const {
  return is_hex(digest, 64) && fs::exists(kb_path(digest));
}

KnowledgeBase FileStore::load_kb(const std::string& digest) const {
  check_digest_syntax(digest);
  const fs::path path = kb_path(digest);
  if (!fs::exists(path)) throw Error(ErrorCode::missing_snapshot, "no KB snapshot " + digest);
  const std::string text = read_file(path);
  if (sha256_hex(text) != digest) {
    throw Error(ErrorCode::digest_mismatch, "KB snapshot " + digest + " is corrupt");
  }
  auto parsed = dsl::parse_kb(text, path.string());
  if (!parsed.ok()) {
    throw Error(ErrorCode::parse_error, parsed.errors.front().format());
  }
  return std::move(*parsed.kb);
}

std::optional<std::string> FileStore::head() const {
  const fs::path path = root_ / "kb" / "HEAD";
  if (!fs::exists(path)) return std::nullopt;
  std::string text = read_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.pop_back();
  }
  if (text.empty()) return std::nullopt;
  return text;
}

void FileStore::set_head(const std::string& digest) {
  check_digest_syntax(digest);
  if (!fs::exists(kb_path(digest))) {
    throw Error(ErrorCode::missing_snapshot, "no KB snapshot " + digest);
  }
  write_atomic(root_ / "kb" / "HEAD", digest + "\n");
}

void FileStore::save_session(const Session& session) {
  check_session_syntax(session.id);
  write_atomic(session_path(session.id), serialize_session(session));
}

bool FileStore::has_session(const std::string& id) const {
  return is_hex(id, 32) && fs::exists(session_path(id));
}

Session FileStore::load_session(const std::string& id) const {
  check_session_syntax(id);
  const fs::path path = session_path(id);
  if (!fs::exists(path)) throw Error(ErrorCode::unknown_session, "no session '" + id + "'");
  SessionRecord rec = parse_session(read_file(path));
  if (rec.session.id != id) {
    throw Error(ErrorCode::parse_error, "session file " + path.string() + " holds another id");
  }
  if (rec.result_current) {
    const KnowledgeBase kb = load_kb(rec.session.kb_version);
    rec.session.last_result = run(kb, rec.session.wm);
  }
  return std::move(rec.session);
}

std::vector<std::string> FileStore::session_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.path().extension() != ".session") continue;
    std::string id = entry.path().stem().string();
    if (is_hex(id, 32)) ids.push_back(std::move(id));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::pair<std::string, bool> ensure_initialized(Store& store, const KnowledgeBase& seed) {
  if (auto head = store.head()) return {*head, false};
  const std::string digest = store.put_kb(seed);
  store.set_head(digest);
  return {digest, true};
}

}  // namespace dsage
