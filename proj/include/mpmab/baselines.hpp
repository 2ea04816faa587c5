#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mpmab/policy.hpp"

namespace mpmab {

// One user's per-arm statistics. A collided transmission carries no
// information about the arm itself, so the means and sample counts cover
// collision-free samples only; attempts count every transmission, which lets
// forced initialization progress even while users trample each other.
struct ArmStats {
  std::vector<std::int64_t> attempts;
  std::vector<std::int64_t> samples;
  std::vector<double> mean;

  explicit ArmStats(int arm_count)
      : attempts(static_cast<std::size_t>(arm_count), 0),
        samples(static_cast<std::size_t>(arm_count), 0),
        mean(static_cast<std::size_t>(arm_count), 0.0) {
    if (arm_count < 1) throw std::invalid_argument("ArmStats: needs at least one arm");
  }

  int arm_count() const { return static_cast<int>(attempts.size()); }

  void record(ArmIndex k, double reward, bool collided) {
    auto i = static_cast<std::size_t>(k);
    ++attempts[i];
    if (collided) return;
    ++samples[i];
    mean[i] += (reward - mean[i]) / static_cast<double>(samples[i]);
  }
};

// UCB1 index: mean + sqrt(2 ln t / pulls).
inline double ucb1_index(double mean, std::int64_t pulls, double t) {
  if (pulls < 1) throw std::invalid_argument("ucb1_index: needs at least one pull");
  if (!(t >= 1.0)) throw std::invalid_argument("ucb1_index: rounds start at 1");
  return mean + std::sqrt(2.0 * std::log(t) / static_cast<double>(pulls));
}

// Bernoulli KL divergence kl(p, q) with the 0 log 0 = 0 convention.
inline double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("bernoulli_kl: arguments must lie in [0, 1]");
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

// Exploration budget f(t) = ln t + 3 ln ln t, clamped at 0 where undefined
// or negative.
inline double klucb_budget(Round t) {
  if (t < 2) return 0.0;
  const double lt = std::log(static_cast<double>(t));
  return std::max(0.0, lt + 3.0 * std::log(lt));
}

// KL-UCB index: the largest q >= mean with pulls * kl(mean, q) <= budget,
// found by bisection on [mean, 1) to within 1e-9.
inline double klucb_index(double mean, std::int64_t pulls, double budget) {
  if (pulls < 1) throw std::invalid_argument("klucb_index: needs at least one pull");
  if (!(budget >= 0.0)) throw std::invalid_argument("klucb_index: budget must be >= 0");
  if (mean >= 1.0) return 1.0;
  double lo = mean, hi = 1.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (static_cast<double>(pulls) * bernoulli_kl(mean, mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

namespace detail {

// Lowest-index arm that has never been attempted, or -1.
inline ArmIndex first_unsampled(const ArmStats& stats) {
  for (ArmIndex k = 0; k < stats.arm_count(); ++k)
    if (stats.attempts[static_cast<std::size_t>(k)] == 0) return k;
  return -1;
}

// argmax over arms with uniform tie breaking. Consumes randomness only when
// there is an actual tie, so rescaling all scores by a positive constant
// leaves the choice unchanged.
template <typename ScoreFn>
ArmIndex argmax_uniform_ties(int arm_count, ScoreFn&& score, Rng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t ties = 0;
  ArmIndex first = 0;
  for (ArmIndex k = 0; k < arm_count; ++k) {
    const double v = score(k);
    if (v > best) {
      best = v;
      ties = 1;
      first = k;
    } else if (v == best) {
      ++ties;
    }
  }
  if (ties <= 1) return first;
  auto pick = rng.below(ties);
  for (ArmIndex k = 0; k < arm_count; ++k) {
    if (score(k) != best) continue;
    if (pick-- == 0) return k;
  }
  return first;
}

}  // namespace detail

// Single-user epsilon-greedy with schedule eps_t = min{1, c K / (d^2 t)},
// dropped unmodified into the multi-user setting. It has no answer to
// collisions: once every user's estimates rank the same arm on top, they all
// exploit it and stay there.
class EpsilonGreedyPolicy final : public Policy {
 public:
  EpsilonGreedyPolicy(int arm_count, double c = 0.1, double d = 0.05)
      : c_(c), d_(d), stats_(arm_count) {
    if (!(c > 0.0)) throw std::invalid_argument("EpsilonGreedyPolicy: c must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("EpsilonGreedyPolicy: d must be positive");
  }

  PolicyAction select(Round t, Rng& rng) override {
    if (ArmIndex k = detail::first_unsampled(stats_); k >= 0)
      return PolicyAction::transmit(k);
    const double eps =
        std::min(1.0, c_ * stats_.arm_count() / (d_ * d_ * static_cast<double>(t)));
    if (rng.bernoulli(eps))
      return PolicyAction::transmit(
          static_cast<ArmIndex>(rng.below(static_cast<std::uint64_t>(stats_.arm_count()))));
    return PolicyAction::transmit(detail::argmax_uniform_ties(
        stats_.arm_count(), [&](ArmIndex k) { return stats_.mean[static_cast<std::size_t>(k)]; },
        rng));
  }

  void update(Round, const PolicyAction& action, double reward, bool collided, Rng&) override {
    if (action.transmits()) stats_.record(*action.arm, reward, collided);
  }

  const ArmStats& stats() const { return stats_; }

 private:
  double c_, d_;
  ArmStats stats_;
};

// Single-user UCB1, dropped unmodified into the multi-user setting. Arms
// attempted but never successfully sampled keep an infinite index until the
// first clean draw lands.
class Ucb1Policy final : public Policy {
 public:
  explicit Ucb1Policy(int arm_count) : stats_(arm_count) {}

  PolicyAction select(Round t, Rng& rng) override {
    if (ArmIndex k = detail::first_unsampled(stats_); k >= 0)
      return PolicyAction::transmit(k);
    return PolicyAction::transmit(detail::argmax_uniform_ties(
        stats_.arm_count(),
        [&](ArmIndex k) {
          auto i = static_cast<std::size_t>(k);
          if (stats_.samples[i] == 0) return std::numeric_limits<double>::infinity();
          return ucb1_index(stats_.mean[i], stats_.samples[i], t);
        },
        rng));
  }

  void update(Round, const PolicyAction& action, double reward, bool collided, Rng&) override {
    if (action.transmits()) stats_.record(*action.arm, reward, collided);
  }

  const ArmStats& stats() const { return stats_; }

 private:
  ArmStats stats_;
};

// Single-user KL-UCB (Bernoulli divergence), dropped unmodified into the
// multi-user setting.
class KlUcbPolicy final : public Policy {
 public:
  explicit KlUcbPolicy(int arm_count) : stats_(arm_count) {}

  PolicyAction select(Round t, Rng& rng) override {
    if (ArmIndex k = detail::first_unsampled(stats_); k >= 0)
      return PolicyAction::transmit(k);
    const double budget = klucb_budget(t);
    return PolicyAction::transmit(detail::argmax_uniform_ties(
        stats_.arm_count(),
        [&](ArmIndex k) {
          auto i = static_cast<std::size_t>(k);
          if (stats_.samples[i] == 0) return std::numeric_limits<double>::infinity();
          return klucb_index(stats_.mean[i], stats_.samples[i], budget);
        },
        rng));
  }

  void update(Round, const PolicyAction& action, double reward, bool collided, Rng&) override {
    if (action.transmits()) stats_.record(*action.arm, reward, collided);
  }

  const ArmStats& stats() const { return stats_; }

 private:
  ArmStats stats_;
};

// Rank-based collision resolution: each user holds a rank in {1..N} (N, the
// user count, is known up front), plays the arm whose UCB1 index is the
// rank-th largest, and redraws its rank uniformly on every collision. Means
// use collision-free samples only; unsampled arms carry an infinite index.
class RhoRandPolicy final : public Policy {
 public:
  RhoRandPolicy(int arm_count, int user_count)
      : stats_(arm_count), user_count_(user_count), order_(static_cast<std::size_t>(arm_count)) {
    if (user_count < 1) throw std::invalid_argument("RhoRandPolicy: needs at least one user");
    if (user_count > arm_count)
      throw std::invalid_argument("RhoRandPolicy: cannot host more users than arms");
  }

  PolicyAction select(Round t, Rng& rng) override {
    if (rank_ == 0) rank_ = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(user_count_)));
    auto score = [&](ArmIndex k) {
      auto i = static_cast<std::size_t>(k);
      if (stats_.samples[i] == 0) return std::numeric_limits<double>::infinity();
      return ucb1_index(stats_.mean[i], stats_.samples[i], t);
    };
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](ArmIndex a, ArmIndex b) { return score(a) > score(b); });
    return PolicyAction::transmit(order_[static_cast<std::size_t>(rank_ - 1)]);
  }

  void update(Round, const PolicyAction& action, double reward, bool collided, Rng& rng) override {
    if (!action.transmits()) return;
    stats_.record(*action.arm, reward, collided);
    if (collided) rank_ = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(user_count_)));
  }

  int rank() const { return rank_; }
  const ArmStats& stats() const { return stats_; }

 private:
  ArmStats stats_;
  int user_count_;
  int rank_ = 0;  // 0 until the first select draws it
  std::vector<ArmIndex> order_;
};

}  // namespace mpmab
