#include "dsage/cf.hpp"

#include <algorithm>
#include <string>

#include "dsage/error.hpp"

namespace dsage {

bool in_unit_interval(double value) noexcept {
  return value >= 0.0 && value <= 1.0;  // false for NaN
}

CertaintyFactor::CertaintyFactor(double value) : value_(value) {
  if (!in_unit_interval(value)) {
    throw Error(ErrorCode::cf_out_of_range,
                "certainty factor " + std::to_string(value) + " outside [0, 1]");
  }
}

std::optional<CertaintyFactor> CertaintyFactor::try_make(double value) noexcept {
  if (!in_unit_interval(value)) return std::nullopt;
  return CertaintyFactor(value);
}

namespace cf {

CertaintyFactor combine(CertaintyFactor old, CertaintyFactor incoming) noexcept {
  const double p = old.value() + (1.0 - old.value()) * incoming.value();
  // Rounding can overshoot 1 by an ulp.
  return CertaintyFactor(std::min(p, 1.0));
}

CertaintyFactor aggregate_and(std::span<const CertaintyFactor> cfs) {
  if (cfs.empty()) throw Error(ErrorCode::empty_premises, "rule has no premises");
  return *std::min_element(cfs.begin(), cfs.end());
}

CertaintyFactor aggregate_or(std::span<const CertaintyFactor> cfs) {
  if (cfs.empty()) throw Error(ErrorCode::empty_premises, "rule has no premises");
  return *std::max_element(cfs.begin(), cfs.end());
}

CertaintyFactor fire(CertaintyFactor rule_cf, CertaintyFactor premise_cf) noexcept {
  return CertaintyFactor(rule_cf.value() * premise_cf.value());
}

}  // namespace cf
}  // namespace dsage
