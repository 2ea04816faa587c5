#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpmab/env.hpp"

namespace mpmab {

// Indices of the n_users largest true means, ascending; ties break toward
// the lower index.
inline std::vector<ArmIndex> optimal_set(std::span<const double> mu, int n_users) {
  if (n_users < 0 || static_cast<std::size_t>(n_users) > mu.size())
    throw std::invalid_argument("optimal_set: user count out of range");
  std::vector<ArmIndex> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) {
    return mu[static_cast<std::size_t>(a)] > mu[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(n_users));
  std::sort(order.begin(), order.end());
  return order;
}

// Best achievable expected sum of rewards in one round with n_users users:
// the sum of the n_users largest means.
inline double optimal_round_value(std::span<const double> mu, int n_users) {
  double sum = 0.0;
  for (ArmIndex k : optimal_set(mu, n_users)) sum += mu[static_cast<std::size_t>(k)];
  return sum;
}

// Expected shortfall of the round: optimal value minus the means of the
// collision-free transmissions. Collisions and silent rounds contribute
// nothing to the achieved side.
inline double pseudo_regret_increment(std::span<const double> mu, const RoundOutcome& round) {
  double got = 0.0;
  for (const UserOutcome& u : round.users)
    if (u.arm && !u.collided) got += mu[static_cast<std::size_t>(*u.arm)];
  return optimal_round_value(mu, static_cast<int>(round.users.size())) - got;
}

// Realized shortfall: optimal value minus the rewards actually drawn.
inline double realized_regret_increment(std::span<const double> mu, const RoundOutcome& round) {
  double got = 0.0;
  for (const UserOutcome& u : round.users) got += u.reward;
  return optimal_round_value(mu, static_cast<int>(round.users.size())) - got;
}

// True iff the round was collision-free and achieved the optimal expected
// sum (to 1e-9, so reorderings of the same optimal arms still count).
inline bool zero_regret_round(std::span<const double> mu, const RoundOutcome& round) {
  double got = 0.0;
  for (const UserOutcome& u : round.users) {
    if (u.collided) return false;
    if (u.arm) got += mu[static_cast<std::size_t>(*u.arm)];
  }
  return got + 1e-9 >= optimal_round_value(mu, static_cast<int>(round.users.size()));
}

// Cumulative per-run series, logged every stride rounds (and at the
// horizon). user_collisions_cum[i][u] is user u's cumulative collision count
// at times[i]; slots for users not yet (or no longer) present just stop
// growing.
struct RegretTrace {
  std::vector<Round> times;
  std::vector<double> pseudo_cum;
  std::vector<double> realized_cum;
  std::vector<std::vector<std::int64_t>> user_collisions_cum;
  std::vector<std::int64_t> optimal_rounds_cum;
};

// Pointwise mean and population standard deviation over repetitions.
// collisions_per_user is each repetition's collision count summed over users
// and divided by the number of user slots.
struct TraceAggregate {
  std::vector<Round> times;
  std::vector<double> pseudo_mean, pseudo_std;
  std::vector<double> realized_mean, realized_std;
  std::vector<double> collisions_per_user_mean, collisions_per_user_std;
  int repetitions = 0;
};

namespace detail {

inline std::pair<double, double> mean_and_std(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

inline TraceAggregate aggregate(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  const auto& times = traces.front().times;
  for (const auto& tr : traces)
    if (tr.times != times)
      throw std::invalid_argument("aggregate: traces were logged at different times");
  TraceAggregate agg;
  agg.times = times;
  agg.repetitions = static_cast<int>(traces.size());
  const std::size_t points = times.size();
  std::vector<double> xs(traces.size());
  auto fill = [&](auto&& value, std::vector<double>& mean_out, std::vector<double>& std_out) {
    mean_out.resize(points);
    std_out.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
      for (std::size_t r = 0; r < traces.size(); ++r) xs[r] = value(traces[r], i);
      auto [m, s] = detail::mean_and_std(xs);
      mean_out[i] = m;
      std_out[i] = s;
    }
  };
  fill([](const RegretTrace& tr, std::size_t i) { return tr.pseudo_cum[i]; },
       agg.pseudo_mean, agg.pseudo_std);
  fill([](const RegretTrace& tr, std::size_t i) { return tr.realized_cum[i]; },
       agg.realized_mean, agg.realized_std);
  fill(
      [](const RegretTrace& tr, std::size_t i) {
        const auto& per_user = tr.user_collisions_cum[i];
        std::int64_t total = 0;
        for (std::int64_t c : per_user) total += c;
        return static_cast<double>(total) / static_cast<double>(per_user.size());
      },
      agg.collisions_per_user_mean, agg.collisions_per_user_std);
  return agg;
}

}  // namespace mpmab
