#include "dsage/session.hpp"

#include <cstdio>
#include <ctime>
#include <random>

#include "dsage/error.hpp"

namespace dsage {

std::string format_timestamp(Timestamp t) {
  const std::time_t tt = t.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  std::tm tm{};
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec) != 6) {
    return std::nullopt;
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t tt = timegm(&tm);
  Timestamp ts{std::chrono::seconds(tt)};
  if (format_timestamp(ts) != text) return std::nullopt;  // rejects 2026-02-31 and friends
  return ts;
}

std::string new_session_id() {
  static thread_local std::random_device device;
  char buf[33];
  std::uint64_t hi = (static_cast<std::uint64_t>(device()) << 32) | device();
  std::uint64_t lo = (static_cast<std::uint64_t>(device()) << 32) | device();
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Session create_session(std::string kb_version) {
  Session s;
  s.id = new_session_id();
  s.created_at = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  s.kb_version = std::move(kb_version);
  return s;
}

Session add_observation(Session session, const KnowledgeBase& kb, Observation obs) {
  check_observation(kb, obs);
  session.wm.put(std::move(obs));
  session.last_result.reset();
  return session;
}

Session remove_observation(Session session, const ObservationKey& key) {
  session.wm.erase(key);
  session.last_result.reset();
  return session;
}

Session replace_observations(Session session, const KnowledgeBase& kb,
                             const std::vector<Observation>& observations) {
  WorkingMemory wm;
  for (const auto& obs : observations) {
    check_observation(kb, obs);
    wm.put(obs);
  }
  session.wm = std::move(wm);
  session.last_result.reset();
  return session;
}

Consultation advise(Session session, const KnowledgeBase& kb) {
  Consultation c;
  InferenceResult result = run(kb, session.wm);
  c.advisories = make_advisories(kb, result);
  session.last_result = std::move(result);
  c.session = std::move(session);
  return c;
}

}  // namespace dsage
