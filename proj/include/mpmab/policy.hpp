#pragma once

#include "mpmab/rng.hpp"
#include "mpmab/types.hpp"

namespace mpmab {

// One user's decision rule. Users never share state or randomness: each
// instance gets its own rng stream, and t is the user's personal round count
// (1-based, counting rounds since the user joined).
//
// Per round the driver calls select(t, rng), plays the action, then calls
// update(t, action, reward, collided, rng) with what the channel reported.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyAction select(Round t, Rng& rng) = 0;
  virtual void update(Round t, const PolicyAction& action, double reward,
                      bool collided, Rng& rng) = 0;
};

}  // namespace mpmab
