#include "dsage/service/service.hpp"

#include "dsage/error.hpp"
#include "dsage/inference.hpp"

namespace dsage::api {

ConsultationService::ConsultationService(Store& store) : store_(store) {
  if (!store_.head()) throw Error(ErrorCode::missing_snapshot, "store has no current KB");
}

std::shared_ptr<const KnowledgeBase> ConsultationService::snapshot(const std::string& version) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = snapshots_.find(version); it != snapshots_.end()) return it->second;
  }
  auto kb = std::make_shared<const KnowledgeBase>(store_.load_kb(version));
  std::lock_guard lock(cache_mutex_);
  return snapshots_.try_emplace(version, std::move(kb)).first->second;
}

KbView ConsultationService::current_kb() const {
  std::string version;
  {
    std::lock_guard lock(kb_mutex_);
    version = *store_.head();
  }
  return {snapshot(version), version};
}

KbView ConsultationService::kb_at(const std::string& version) const {
  return {snapshot(version), version};
}

std::string ConsultationService::commit(const KnowledgeBase& kb) {
  const std::string version = store_.put_kb(kb);
  store_.set_head(version);
  return version;
}

std::string ConsultationService::put_rule(const std::string& if_match, Rule rule) {
  std::lock_guard lock(kb_mutex_);
  const std::string head = *store_.head();
  if (if_match != head) {
    throw Error(ErrorCode::kb_conflict, "KB changed: current version is " + head);
  }
  return commit(upsert_rule(*snapshot(head), std::move(rule)));
}

std::string ConsultationService::delete_rule(const std::string& if_match, const std::string& id) {
  std::lock_guard lock(kb_mutex_);
  const std::string head = *store_.head();
  if (if_match != head) {
    throw Error(ErrorCode::kb_conflict, "KB changed: current version is " + head);
  }
  return commit(dsage::delete_rule(*snapshot(head), id));
}

std::shared_ptr<std::mutex> ConsultationService::session_lock(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  if (!session_locks_.contains(id) && !store_.has_session(id)) {
    throw Error(ErrorCode::unknown_session, "no session '" + id + "'");
  }
  auto& slot = session_locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

// Callers hold the session's lock.
Session ConsultationService::load(const std::string& id) {
  {
    std::lock_guard lock(sessions_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  Session s = store_.load_session(id);
  std::lock_guard lock(sessions_mutex_);
  sessions_[id] = s;
  return s;
}

void ConsultationService::save(const Session& session) {
  store_.save_session(session);
  std::lock_guard lock(sessions_mutex_);
  sessions_[session.id] = session;
}

Session ConsultationService::create_session() {
  Session s = dsage::create_session(current_kb().version);
  std::lock_guard lock(sessions_mutex_);
  session_locks_[s.id] = std::make_shared<std::mutex>();
  store_.save_session(s);
  sessions_[s.id] = s;
  return s;
}

Session ConsultationService::get_session(const std::string& id) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  return load(id);
}

Session ConsultationService::replace_observations(const std::string& id,
                                                  const std::vector<Observation>& obs) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  const auto kb = snapshot(s.kb_version);
  s = dsage::replace_observations(std::move(s), *kb, obs);
  save(s);
  return s;
}

Consultation ConsultationService::advise(const std::string& id) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  const auto kb = snapshot(s.kb_version);
  Consultation c = dsage::advise(std::move(s), *kb);
  save(c.session);
  return c;
}

RebaseOutcome ConsultationService::rebase(const std::string& id) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  const KbView head = current_kb();
  RebaseOutcome out;
  out.rebased = head.version != s.kb_version;
  if (out.rebased) {
    WorkingMemory kept;
    for (const auto& [key, obs] : s.wm) {
      try {
        check_observation(*head.kb, obs);
        kept.put(obs);
      } catch (const Error&) {
        out.dropped.push_back(obs);
      }
    }
    s.wm = std::move(kept);
    s.kb_version = head.version;
  }
  out.consultation = dsage::advise(std::move(s), *head.kb);
  save(out.consultation.session);
  return out;
}

}  // namespace dsage::api
