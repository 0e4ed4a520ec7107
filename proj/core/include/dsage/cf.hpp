#pragma once

#include <compare>
#include <optional>
#include <span>

namespace dsage {

/// Confidence value in [0, 1] attached to rules, observations and
/// conclusions. Construction outside the closed unit interval throws
/// Error(ErrorCode::cf_out_of_range); NaN is rejected as well.
class CertaintyFactor {
 public:
  constexpr CertaintyFactor() noexcept = default;
  explicit CertaintyFactor(double value);

  static std::optional<CertaintyFactor> try_make(double value) noexcept;

  constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(CertaintyFactor, CertaintyFactor) = default;
  friend constexpr auto operator<=>(CertaintyFactor a, CertaintyFactor b) {
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
};

bool in_unit_interval(double value) noexcept;

namespace cf {

/// Parallel-evidence combination: old + (1 - old) * incoming.
CertaintyFactor combine(CertaintyFactor old, CertaintyFactor incoming) noexcept;

/// Premise CF of a conjunction: the weakest precondition.
/// Throws Error(ErrorCode::empty_premises) on an empty list.
CertaintyFactor aggregate_and(std::span<const CertaintyFactor> cfs);

/// Premise CF of a disjunction: the strongest precondition.
CertaintyFactor aggregate_or(std::span<const CertaintyFactor> cfs);

/// Contribution of a fired rule: expert CF scaled by the premise CF.
CertaintyFactor fire(CertaintyFactor rule_cf, CertaintyFactor premise_cf) noexcept;

}  // namespace cf
}  // namespace dsage
