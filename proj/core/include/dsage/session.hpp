#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "dsage/advisory.hpp"
#include "dsage/inference.hpp"
#include "dsage/kb.hpp"

namespace dsage {

using Timestamp = std::chrono::sys_seconds;

// 2026-10-19T08:30:00Z
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);

// 128 random bits rendered as 32 lowercase hex characters.
std::string new_session_id();

struct Session {
  std::string id;
  Timestamp created_at{};
  std::string kb_version;
  WorkingMemory wm;
  std::optional<InferenceResult> last_result;

  bool operator==(const Session&) const = default;
};

Session create_session(std::string kb_version);

// Observation edits validate against the pinned KB and drop last_result.
Session add_observation(Session session, const KnowledgeBase& kb, Observation obs);
Session remove_observation(Session session, const ObservationKey& key);
Session replace_observations(Session session, const KnowledgeBase& kb,
                             const std::vector<Observation>& observations);

struct Consultation {
  Session session;  // with last_result populated
  std::vector<Advisory> advisories;
};

// Runs inference for the session's working memory against `kb`, which must
// be the snapshot named by session.kb_version.
Consultation advise(Session session, const KnowledgeBase& kb);

}  // namespace dsage
