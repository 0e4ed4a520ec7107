#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dsage/inference.hpp"
#include "dsage/kb.hpp"
#include "dsage/session.hpp"

namespace dsage::api {

using Json = nlohmann::ordered_json;

inline constexpr const char* kConsultationSchema = "dsage.consultation/1";

// Renders like Json::dump(), except every floating-point number is printed
// with exactly six decimals ("cf": 0.400000). Integers stay integers.
std::string dump_fixed(const Json& j, int indent = -1);

// "%.6f"
std::string fixed6(double value);

Json to_json(const Indicator& ind);
Json to_json(const Rule& rule);
Json to_json(const Hypothesis& h);
Json to_json(const Observation& obs);
Json kb_to_json(const KnowledgeBase& kb, const std::string& version);
Json session_to_json(const Session& session);

// Advisories, explain traces, contradiction warnings and skipped rules.
Json consultation_to_json(const Consultation& c);

// Request decoding. Malformed input throws BadRequest.
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Rule rule_from_json(const Json& j, const std::string& id);
Observation observation_from_json(const Json& j);
std::vector<Observation> observations_from_json(const Json& j);

}  // namespace dsage::api
