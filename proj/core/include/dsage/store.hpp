#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsage/kb.hpp"
#include "dsage/session.hpp"

namespace dsage {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of the canonical serialization; identifies a KB snapshot.
std::string kb_digest(const KnowledgeBase& kb);

// Session record codec (see FORMATS.md). The record notes whether a result
// was current; the result itself is recomputed from the pinned KB on load.
struct SessionRecord {
  Session session;  // last_result always empty
  bool result_current = false;
};

std::string serialize_session(const Session& session);
// Throws Error(parse_error) on a malformed record.
SessionRecord parse_session(std::string_view text);

// Storage seam. Snapshots are immutable once written.
class Store {
 public:
  virtual ~Store() = default;

  virtual std::string put_kb(const KnowledgeBase& kb) = 0;
  virtual KnowledgeBase load_kb(const std::string& digest) const = 0;
  virtual bool has_kb(const std::string& digest) const = 0;

  virtual std::optional<std::string> head() const = 0;
  virtual void set_head(const std::string& digest) = 0;

  virtual void save_session(const Session& session) = 0;
  virtual Session load_session(const std::string& id) const = 0;
  virtual bool has_session(const std::string& id) const = 0;
  virtual std::vector<std::string> session_ids() const = 0;
};

// Directory layout:
//   <root>/kb/<digest>.dkb
//   <root>/kb/HEAD
//   <root>/sessions/<id>.session
// Writes go through a temporary file and rename.
class FileStore final : public Store {
 public:
  explicit FileStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  std::string put_kb(const KnowledgeBase& kb) override;
  KnowledgeBase load_kb(const std::string& digest) const override;
  bool has_kb(const std::string& digest) const override;

  std::optional<std::string> head() const override;
  void set_head(const std::string& digest) override;

  void save_session(const Session& session) override;
  Session load_session(const std::string& id) const override;
  bool has_session(const std::string& id) const override;
  std::vector<std::string> session_ids() const override;

  std::filesystem::path kb_path(const std::string& digest) const;
  std::filesystem::path session_path(const std::string& id) const;

 private:
  std::filesystem::path root_;
};

// If the store has no HEAD, writes `seed` and points HEAD at it. Returns the
// digest HEAD names afterwards and whether initialization happened.
std::pair<std::string, bool> ensure_initialized(Store& store, const KnowledgeBase& seed);

}  // namespace dsage
