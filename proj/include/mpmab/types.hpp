#pragma once

#include <cstdint>
#include <optional>

namespace mpmab {

// Rounds are 1-based and slot-synchronous: every active user acts once per
// round.
using Round = std::int64_t;
using UserId = std::int32_t;
using ArmIndex = std::int32_t;

// One user's decision for a round: transmit on a single arm, or stay silent.
struct PolicyAction {
  std::optional<ArmIndex> arm;

  static PolicyAction transmit(ArmIndex a) { return PolicyAction{a}; }
  static PolicyAction refrain() { return PolicyAction{std::nullopt}; }

  bool transmits() const { return arm.has_value(); }

  bool operator==(const PolicyAction&) const = default;
};

}  // namespace mpmab
