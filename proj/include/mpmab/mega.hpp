#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpmab/policy.hpp"

namespace mpmab {

// Parameters of the MEGA policy: epsilon-greedy learning plus ALOHA-style
// collision avoidance. Defaults are the cross-validated values used by the
// bundled presets.
struct MegaParams {
  double c = 0.1;      // exploration scale
  double d = 0.05;     // reward-gap parameter of the exploration schedule
  double p0 = 0.6;     // persistence probability after a reset
  double alpha = 0.5;  // persistence growth rate per successful round
  double beta = 0.8;   // backoff-window growth exponent

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("MegaParams: c must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("MegaParams: d must be positive");
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("MegaParams: p0 must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("MegaParams: alpha must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("MegaParams: beta must lie in (0, 1)");
  }

  bool operator==(const MegaParams&) const = default;
};

// Exploration probability eps_t = min{1, c K^2 / (d^2 (K-1) t)}.
// Non-increasing in t; equal to 1 through the forced exploration phase.
inline double exploration_probability(const MegaParams& params, int arm_count, Round t) {
  if (arm_count < 2)
    throw std::invalid_argument("exploration_probability: needs at least two arms");
  if (t < 1) throw std::invalid_argument("exploration_probability: rounds start at 1");
  const double raw = params.c * arm_count * arm_count /
                     (params.d * params.d * (arm_count - 1) * static_cast<double>(t));
  return std::min(1.0, raw);
}

// Persistence probability after m consecutive successful samples of the same
// arm: 1 - alpha^m (1 - p0). Closed form of iterating p <- p a + (1 - a)
// from p0; approaches 1 as the streak grows.
inline double persistence_after_successes(std::int64_t streak, double p0, double alpha) {
  if (streak < 0) throw std::invalid_argument("persistence_after_successes: negative streak");
  return 1.0 - std::pow(alpha, static_cast<double>(streak)) * (1.0 - p0);
}

// Everything one MEGA user remembers between rounds.
struct MegaState {
  double persistence;
  std::int64_t success_streak = 0;
  std::optional<ArmIndex> last_arm;
  bool last_collided = false;
  std::vector<Round> unavailable_until;  // arm k may be sampled once unavailable_until[k] <= t
  std::vector<double> mean_estimate;     // empirical means over collision-free samples
  std::vector<std::int64_t> success_count;

  MegaState(int arm_count, double p0)
      : persistence(p0),
        unavailable_until(static_cast<std::size_t>(arm_count), 1),
        mean_estimate(static_cast<std::size_t>(arm_count), 0.0),
        success_count(static_cast<std::size_t>(arm_count), 0) {
    if (arm_count < 1) throw std::invalid_argument("MegaState: needs at least one arm");
  }

  int arm_count() const { return static_cast<int>(mean_estimate.size()); }
};

// Pick the round-t action. A pending collision is resolved first: persist on
// the disputed arm with the current persistence probability (bypassing
// exploration), or give up, marking the arm unavailable until a uniformly
// drawn round in [t, t + floor(t^beta)] and resetting persistence. Then pick
// among available arms epsilon-greedily on the collision-free means; with no
// arm available, stay silent. Switching arms resets the persistence state.
inline PolicyAction mega_select(MegaState& s, const MegaParams& params, Round t, Rng& rng) {
  const int arm_count = s.arm_count();
  if (t < 1) throw std::invalid_argument("mega_select: rounds start at 1");
  if (s.last_collided) {
    if (rng.bernoulli(s.persistence)) return PolicyAction::transmit(*s.last_arm);
    const auto span = static_cast<std::uint64_t>(
        std::floor(std::pow(static_cast<double>(t), params.beta)));
    s.unavailable_until[static_cast<std::size_t>(*s.last_arm)] =
        t + static_cast<Round>(rng.below(span + 1));
    s.persistence = params.p0;
    s.success_streak = 0;
  }

  int available = 0;
  for (ArmIndex k = 0; k < arm_count; ++k)
    if (s.unavailable_until[static_cast<std::size_t>(k)] <= t) ++available;
  if (available == 0) return PolicyAction::refrain();

  ArmIndex chosen = -1;
  if (rng.bernoulli(exploration_probability(params, arm_count, t))) {
    auto pick = rng.below(static_cast<std::uint64_t>(available));
    for (ArmIndex k = 0; k < arm_count; ++k) {
      if (s.unavailable_until[static_cast<std::size_t>(k)] > t) continue;
      if (pick-- == 0) {
        chosen = k;
        break;
      }
    }
  } else {
    double best = -1.0;
    std::uint64_t ties = 0;
    for (ArmIndex k = 0; k < arm_count; ++k) {
      if (s.unavailable_until[static_cast<std::size_t>(k)] > t) continue;
      const double v = s.mean_estimate[static_cast<std::size_t>(k)];
      if (v > best) {
        best = v;
        ties = 1;
        chosen = k;
      } else if (v == best) {
        ++ties;
      }
    }
    if (ties > 1) {
      auto pick = rng.below(ties);
      for (ArmIndex k = 0; k < arm_count; ++k) {
        if (s.unavailable_until[static_cast<std::size_t>(k)] > t) continue;
        if (s.mean_estimate[static_cast<std::size_t>(k)] != best) continue;
        if (pick-- == 0) {
          chosen = k;
          break;
        }
      }
    }
  }

  if (!s.last_arm || *s.last_arm != chosen) {
    s.persistence = params.p0;
    s.success_streak = 0;
  }
  return PolicyAction::transmit(chosen);
}

// Fold the round's outcome back into the state. A collision freezes the
// persistence, streak and means (the next select resolves it); a
// collision-free transmission updates the sampled arm's running mean, grows
// the streak and raises persistence by p <- p alpha + (1 - alpha).
inline void mega_update(MegaState& s, const MegaParams& params, const PolicyAction& action,
                        double reward, bool collided) {
  if (!(reward >= 0.0 && reward <= 1.0))
    throw std::invalid_argument("mega_update: reward must lie in [0, 1]");
  if (!action.transmits()) {
    s.last_collided = false;
    return;
  }
  const ArmIndex a = *action.arm;
  if (a < 0 || a >= s.arm_count()) throw std::out_of_range("mega_update: arm index out of range");
  s.last_arm = a;
  if (collided) {
    s.last_collided = true;
    return;
  }
  s.last_collided = false;
  auto& n = s.success_count[static_cast<std::size_t>(a)];
  ++n;
  s.mean_estimate[static_cast<std::size_t>(a)] +=
      (reward - s.mean_estimate[static_cast<std::size_t>(a)]) / static_cast<double>(n);
  ++s.success_streak;
  s.persistence = s.persistence * params.alpha + (1.0 - params.alpha);
}

class MegaPolicy final : public Policy {
 public:
  MegaPolicy(int arm_count, MegaParams params = {})
      : params_(params), state_(arm_count, params.p0) {
    if (arm_count < 2) throw std::invalid_argument("MegaPolicy: needs at least two arms");
    params_.validate();
  }

  PolicyAction select(Round t, Rng& rng) override { return mega_select(state_, params_, t, rng); }

  void update(Round, const PolicyAction& action, double reward, bool collided, Rng&) override {
    mega_update(state_, params_, action, reward, collided);
  }

  const MegaParams& params() const { return params_; }
  const MegaState& state() const { return state_; }
  MegaState& state() { return state_; }

 private:
  MegaParams params_;
  MegaState state_;
};

// True iff the empirical means rank the top_m best arms (by true mean, ties
// toward the lower index) consistently with the true means at tolerance eps:
// for every ordered pair (i, j) of distinct arms in that set,
// mean_estimate[i] <= mean_estimate[j] holds exactly when mu[i] + eps <= mu[j].
// Deliberately literal: arms within eps of each other make the right side
// false for both orders, so their estimates must be strictly ordered both
// ways, which is impossible, and the predicate returns false.
inline bool is_epsilon_correct_ranking(std::span<const double> mean_estimate,
                                       std::span<const double> mu, double eps, int top_m) {
  if (mean_estimate.size() != mu.size())
    throw std::invalid_argument("is_epsilon_correct_ranking: vector sizes differ");
  if (top_m < 0 || static_cast<std::size_t>(top_m) > mu.size())
    throw std::invalid_argument("is_epsilon_correct_ranking: top_m out of range");
  if (!(eps >= 0.0)) throw std::invalid_argument("is_epsilon_correct_ranking: eps must be >= 0");
  std::vector<ArmIndex> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) {
    return mu[static_cast<std::size_t>(a)] > mu[static_cast<std::size_t>(b)];
  });
  for (int i = 0; i < top_m; ++i) {
    for (int j = 0; j < top_m; ++j) {
      if (i == j) continue;
      const auto a = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
      const auto b = static_cast<std::size_t>(order[static_cast<std::size_t>(j)]);
      if ((mean_estimate[a] <= mean_estimate[b]) != (mu[a] + eps <= mu[b])) return false;
    }
  }
  return true;
}

}  // namespace mpmab
