#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsage/kb.hpp"
#include "dsage/session.hpp"
#include "dsage/store.hpp"

namespace dsage::api {

struct KbView {
  std::shared_ptr<const KnowledgeBase> kb;
  std::string version;
};

struct RebaseOutcome {
  Consultation consultation;
  bool rebased = false;
  std::vector<Observation> dropped;  // no longer valid under the new catalog
};

// Transport-independent backend for the HTTP API. Thread-safe: KB edits are
// serialized on one lock and checked against the caller's digest; each
// session has its own lock; snapshots are immutable and shared.
class ConsultationService {
 public:
  explicit ConsultationService(Store& store);

  KbView current_kb() const;
  KbView kb_at(const std::string& version) const;

  // Both require if_match to equal the current version, else
  // Error(kb_conflict). Return the new version.
  std::string put_rule(const std::string& if_match, Rule rule);
  std::string delete_rule(const std::string& if_match, const std::string& id);

  Session create_session();
  Session get_session(const std::string& id);
  Session replace_observations(const std::string& id, const std::vector<Observation>& obs);
  Consultation advise(const std::string& id);
  RebaseOutcome rebase(const std::string& id);

 private:
  std::shared_ptr<const KnowledgeBase> snapshot(const std::string& version) const;
  std::shared_ptr<std::mutex> session_lock(const std::string& id);
  Session load(const std::string& id);
  void save(const Session& session);
  std::string commit(const KnowledgeBase& kb);

  Store& store_;
  mutable std::mutex kb_mutex_;     // head and edits
  mutable std::mutex cache_mutex_;  // snapshot cache
  mutable std::map<std::string, std::shared_ptr<const KnowledgeBase>> snapshots_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> session_locks_;
  std::map<std::string, Session> sessions_;  // guarded by the session's own lock once present
};

}  // namespace dsage::api
