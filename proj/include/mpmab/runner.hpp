#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mpmab/metrics.hpp"
#include "mpmab/scenario.hpp"

namespace mpmab {

struct RunOptions {
  // 0 means: take MPMAB_JOBS from the environment, else the hardware thread
  // count.
  int jobs = 0;
  // Rounds (ascending) at which to snapshot the largest per-pair per-arm
  // collision count seen so far.
  std::vector<Round> pair_checkpoints;
};

struct RepetitionResult {
  RegretTrace trace;
  // One entry per requested checkpoint: max over (user pair, arm) of the
  // cumulative collision count between that pair on that arm.
  std::vector<std::int64_t> max_pair_arm_collisions;
};

using RoundObserver = std::function<void(const RoundOutcome&)>;

// Runs one repetition: (scenario, repetition index) -> trace, with no other
// inputs. The environment uses rng stream 0 of the repetition seed, user n
// uses stream n+1, so repetitions are reproducible in isolation and in any
// execution order. The observer, when set, sees every round's outcome.
inline RepetitionResult simulate_repetition(const Scenario& s, int repetition,
                                            const std::vector<Round>& pair_checkpoints = {},
                                            const RoundObserver& observer = {}) {
  s.validate();
  const std::uint64_t seed = derive_seed(s.master_seed, static_cast<std::uint64_t>(repetition));
  Environment env(s.arms, s.schedule, seed);
  const int slots = s.schedule.user_slots();
  const int arm_count = s.arms.size();

  std::vector<std::unique_ptr<Policy>> policies(static_cast<std::size_t>(slots));
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(slots));
  for (int u = 0; u < slots; ++u) streams.emplace_back(seed, static_cast<std::uint64_t>(u) + 1);
  std::vector<Round> local_clock(static_cast<std::size_t>(slots), 0);

  // The per-round optimal value only depends on how many users are active.
  std::vector<double> optimal_value(static_cast<std::size_t>(arm_count) + 1, 0.0);
  for (int n = 0; n <= arm_count; ++n) optimal_value[static_cast<std::size_t>(n)] =
      optimal_round_value(s.arms.mu, n);

  double pseudo_cum = 0.0, realized_cum = 0.0;
  std::vector<std::int64_t> user_collisions(static_cast<std::size_t>(slots), 0);
  std::int64_t optimal_rounds = 0;

  // (user, user, arm) -> cumulative collision count, keyed compactly.
  std::unordered_map<std::uint64_t, std::int64_t> pair_collisions;
  std::int64_t pair_max = 0;
  std::size_t next_checkpoint = 0;

  RepetitionResult result;
  std::vector<UserChoice> choices;
  std::vector<PolicyAction> actions(static_cast<std::size_t>(slots));
  std::vector<UserId> arm_users;  // scratch for pair accounting

  for (Round t = 1; t <= s.horizon; ++t) {
    const auto& active = env.current_users();
    choices.clear();
    for (UserId uid : active) {
      const auto slot = static_cast<std::size_t>(uid);
      if (!policies[slot]) policies[slot] = make_policy(s.policy, arm_count);
      ++local_clock[slot];
      actions[slot] = policies[slot]->select(local_clock[slot], streams[slot]);
      choices.push_back({uid, actions[slot].arm});
    }
    const RoundOutcome round = env.resolve_round(choices);

    double got_mu = 0.0, got_reward = 0.0;
    bool any_collision = false;
    for (const UserOutcome& u : round.users) {
      const auto slot = static_cast<std::size_t>(u.user);
      policies[slot]->update(local_clock[slot], actions[slot], u.reward, u.collided,
                             streams[slot]);
      if (u.collided) {
        any_collision = true;
        ++user_collisions[slot];
      } else if (u.arm) {
        got_mu += s.arms.mu[static_cast<std::size_t>(*u.arm)];
      }
      got_reward += u.reward;
    }
    const auto n_active = static_cast<std::size_t>(round.users.size());
    pseudo_cum += optimal_value[n_active] - got_mu;
    realized_cum += optimal_value[n_active] - got_reward;
    if (!any_collision && got_mu + 1e-9 >= optimal_value[n_active]) ++optimal_rounds;

    if (!pair_checkpoints.empty()) {
      if (any_collision) {
        for (ArmIndex k = 0; k < arm_count; ++k) {
          arm_users.clear();
          for (const UserOutcome& u : round.users)
            if (u.collided && u.arm && *u.arm == k) arm_users.push_back(u.user);
          for (std::size_t i = 0; i < arm_users.size(); ++i)
            for (std::size_t j = i + 1; j < arm_users.size(); ++j) {
              const std::uint64_t key = (static_cast<std::uint64_t>(arm_users[i]) << 42) |
                                        (static_cast<std::uint64_t>(arm_users[j]) << 21) |
                                        static_cast<std::uint64_t>(k);
              pair_max = std::max(pair_max, ++pair_collisions[key]);
            }
        }
      }
      while (next_checkpoint < pair_checkpoints.size() &&
             t == pair_checkpoints[next_checkpoint]) {
        result.max_pair_arm_collisions.push_back(pair_max);
        ++next_checkpoint;
      }
    }

    if (observer) observer(round);

    if (t % s.stride == 0 || t == s.horizon) {
      result.trace.times.push_back(t);
      result.trace.pseudo_cum.push_back(pseudo_cum);
      result.trace.realized_cum.push_back(realized_cum);
      result.trace.user_collisions_cum.push_back(user_collisions);
      result.trace.optimal_rounds_cum.push_back(optimal_rounds);
    }
  }
  // Checkpoints past the horizon report the final state.
  while (next_checkpoint++ < pair_checkpoints.size())
    result.max_pair_arm_collisions.push_back(pair_max);
  return result;
}

// Worker count: explicit request, else $MPMAB_JOBS, else hardware threads.
inline int resolve_job_count(int requested) {
  if (requested < 0) throw std::invalid_argument("resolve_job_count: negative worker count");
  if (requested > 0) return std::min(requested, 256);
  if (const char* env = std::getenv("MPMAB_JOBS")) {
    const int v = detail::parse_int_or_throw<int>(env, "MPMAB_JOBS");
    if (v < 1) throw std::invalid_argument("MPMAB_JOBS must be a positive integer");
    return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

struct RunResult {
  TraceAggregate aggregate;
  std::vector<RepetitionResult> repetitions;
};

// Runs every repetition of the scenario on a worker pool. Results are
// identical for any worker count: repetitions are seeded independently and
// aggregated in repetition-index order regardless of completion order. A
// failing repetition fails the whole run with a per-repetition diagnostic.
inline RunResult run_scenario(const Scenario& s, const RunOptions& options = {}) {
  s.validate();
  const int reps = s.repetitions;
  RunResult result;
  result.repetitions.resize(static_cast<std::size_t>(reps));
  const int jobs = std::min(resolve_job_count(options.jobs), reps);
  if (jobs <= 1) {
    for (int r = 0; r < reps; ++r)
      result.repetitions[static_cast<std::size_t>(r)] =
          simulate_repetition(s, r, options.pair_checkpoints);
  } else {
    std::atomic<int> next{0};
    std::vector<std::string> errors(static_cast<std::size_t>(reps));
    std::atomic<bool> failed{false};
    auto worker = [&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= reps) return;
        try {
          result.repetitions[static_cast<std::size_t>(r)] =
              simulate_repetition(s, r, options.pair_checkpoints);
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(r)] = e.what();
          failed.store(true);
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) {
      std::string message = "run_scenario failed:";
      for (int r = 0; r < reps; ++r)
        if (!errors[static_cast<std::size_t>(r)].empty())
          message += "\n  repetition " + std::to_string(r) + ": " + errors[static_cast<std::size_t>(r)];
      throw std::runtime_error(message);
    }
  }
  std::vector<RegretTrace> traces;
  traces.reserve(static_cast<std::size_t>(reps));
  for (const auto& rep : result.repetitions) traces.push_back(rep.trace);
  result.aggregate = aggregate(traces);
  return result;
}

}  // namespace mpmab
