#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpmab/rng.hpp"
#include "mpmab/types.hpp"

namespace mpmab {

enum class RewardKind { kBernoulli };

// The arm pool. mu[k] is arm k's mean reward; a collision-free transmission
// on arm k draws a reward from the arm's distribution, a collision pays 0.
struct ArmSet {
  std::vector<double> mu;
  RewardKind kind = RewardKind::kBernoulli;

  int size() const { return static_cast<int>(mu.size()); }

  void validate() const {
    if (mu.empty()) throw std::invalid_argument("ArmSet: needs at least one arm");
    for (double m : mu)
      if (!(m >= 0.0 && m <= 1.0))
        throw std::invalid_argument("ArmSet: every mean must lie in [0, 1]");
  }

  bool operator==(const ArmSet&) const = default;
};

// A user joining or leaving at the start of round `time`. A leave at t means
// the user no longer acts at t, so its arm is free from round t on.
struct ScheduleEvent {
  Round time = 1;
  UserId user = 0;
  bool joins = true;

  bool operator==(const ScheduleEvent&) const = default;
};

// Arrival/departure plan for the whole run. User ids are small dense
// integers; id n maps to rng stream n+1.
struct UserSchedule {
  std::vector<ScheduleEvent> events;

  static UserSchedule fixed_users(int n) {
    UserSchedule s;
    for (UserId u = 0; u < n; ++u) s.events.push_back({1, u, true});
    return s;
  }

  // Sort events by (time, user, leaves-before-joins) so queries and
  // serialization are order-independent.
  void canonicalize() {
    std::stable_sort(events.begin(), events.end(),
                     [](const ScheduleEvent& a, const ScheduleEvent& b) {
                       if (a.time != b.time) return a.time < b.time;
                       if (a.user != b.user) return a.user < b.user;
                       return !a.joins && b.joins;
                     });
  }

  int user_slots() const {
    UserId max_id = -1;
    for (const auto& e : events) max_id = std::max(max_id, e.user);
    return max_id + 1;
  }

  // Active user ids at round t, ascending.
  std::vector<UserId> active_at(Round t) const {
    UserSchedule sorted = *this;
    sorted.canonicalize();
    std::vector<bool> active(static_cast<std::size_t>(user_slots()), false);
    for (const auto& e : sorted.events) {
      if (e.time > t) break;
      active[static_cast<std::size_t>(e.user)] = e.joins;
    }
    std::vector<UserId> out;
    for (UserId u = 0; u < static_cast<UserId>(active.size()); ++u)
      if (active[static_cast<std::size_t>(u)]) out.push_back(u);
    return out;
  }

  int peak_active() const {
    UserSchedule sorted = *this;
    sorted.canonicalize();
    int now = 0, peak = 0;
    for (const auto& e : sorted.events) {
      now += e.joins ? 1 : -1;
      peak = std::max(peak, now);
    }
    return peak;
  }

  // Rejects schedules the simulation cannot honor: nobody present at round 1,
  // more active users than arms, or ill-formed per-user event sequences.
  void validate(int arm_count) const {
    if (events.empty())
      throw std::invalid_argument("UserSchedule: no events; at least one user must join at round 1");
    UserSchedule sorted = *this;
    sorted.canonicalize();
    if (sorted.events.front().time != 1)
      throw std::invalid_argument("UserSchedule: the first join must happen at round 1");
    std::map<UserId, std::pair<bool, Round>> per_user;  // (expect join, last event time)
    int active = 0;
    for (std::size_t i = 0; i < sorted.events.size(); ++i) {
      const auto& e = sorted.events[i];
      if (e.time < 1) throw std::invalid_argument("UserSchedule: event times start at round 1");
      if (e.user < 0) throw std::invalid_argument("UserSchedule: user ids are non-negative");
      if (e.user >= 1'000'000) throw std::invalid_argument("UserSchedule: user id out of range");
      auto [it, fresh] = per_user.try_emplace(e.user, true, Round{0});
      auto& [expect_join, last_time] = it->second;
      if (e.joins != expect_join)
        throw std::invalid_argument(
            e.joins ? "UserSchedule: user joins twice without leaving"
                    : "UserSchedule: user leaves without having joined");
      if (!fresh && e.time <= last_time)
        throw std::invalid_argument("UserSchedule: a user's events must have strictly increasing times");
      expect_join = !e.joins;
      last_time = e.time;
      active += e.joins ? 1 : -1;
      const bool batch_done =
          i + 1 == sorted.events.size() || sorted.events[i + 1].time != e.time;
      if (batch_done) {
        if (active < 1)
          throw std::invalid_argument("UserSchedule: at least one user must stay active at all times");
        if (active > arm_count)
          throw std::invalid_argument("UserSchedule: more concurrent users than arms");
      }
    }
  }

  bool operator==(const UserSchedule&) const = default;
};

struct UserChoice {
  UserId user = 0;
  std::optional<ArmIndex> arm;  // nullopt = refrain
};

struct UserOutcome {
  UserId user = 0;
  std::optional<ArmIndex> arm;
  double reward = 0.0;
  bool collided = false;
};

struct RoundOutcome {
  Round time = 0;
  std::vector<UserOutcome> users;  // ascending user id, one entry per active user
};

// Slot-synchronous collision channel. Each round, every active user submits
// one choice; a user transmitting alone on an arm draws that arm's reward,
// while two or more users on the same arm all receive 0 and a collision flag.
// (seed, schedule, arms, choice sequence) -> outcome sequence is a pure
// function.
class Environment {
 public:
  Environment(ArmSet arms, UserSchedule schedule, std::uint64_t seed)
      : arms_(std::move(arms)), schedule_(std::move(schedule)), rng_(seed, 0) {
    arms_.validate();
    schedule_.validate(arms_.size());
    schedule_.canonicalize();
    advance_to(1);
  }

  const ArmSet& arms() const { return arms_; }
  const UserSchedule& schedule() const { return schedule_; }
  Round now() const { return now_; }

  // Active users this round, ascending.
  const std::vector<UserId>& current_users() const { return active_; }

  std::vector<UserId> active_users(Round t) const { return schedule_.active_at(t); }

  // Resolves one round. `choices` must list exactly the currently active
  // users, in ascending user order. Advances the clock.
  RoundOutcome resolve_round(const std::vector<UserChoice>& choices) {
    if (choices.size() != active_.size())
      throw std::invalid_argument("Environment: need one choice per active user");
    RoundOutcome out;
    out.time = now_;
    out.users.resize(choices.size());
    std::vector<int> load(static_cast<std::size_t>(arms_.size()), 0);
    for (std::size_t i = 0; i < choices.size(); ++i) {
      const auto& c = choices[i];
      if (c.user != active_[i])
        throw std::invalid_argument("Environment: choices must match the active users in order");
      if (c.arm) {
        if (*c.arm < 0 || *c.arm >= arms_.size())
          throw std::out_of_range("Environment: arm index out of range");
        ++load[static_cast<std::size_t>(*c.arm)];
      }
    }
    // Rewards are drawn in ascending user order for the collision-free
    // transmitters only, so the draw sequence is reproducible.
    for (std::size_t i = 0; i < choices.size(); ++i) {
      auto& u = out.users[i];
      u.user = choices[i].user;
      u.arm = choices[i].arm;
      if (!u.arm) continue;
      if (load[static_cast<std::size_t>(*u.arm)] > 1) {
        u.collided = true;
      } else {
        u.reward = rng_.bernoulli(arms_.mu[static_cast<std::size_t>(*u.arm)]) ? 1.0 : 0.0;
      }
    }
    advance_to(now_ + 1);
    return out;
  }

 private:
  // schedule_ is canonicalized in the constructor, so events apply in order.
  void advance_to(Round t) {
    now_ = t;
    while (next_event_ < schedule_.events.size() &&
           schedule_.events[next_event_].time <= t) {
      const auto& e = schedule_.events[next_event_++];
      auto pos = std::lower_bound(active_.begin(), active_.end(), e.user);
      if (e.joins) {
        if (pos == active_.end() || *pos != e.user) active_.insert(pos, e.user);
      } else if (pos != active_.end() && *pos == e.user) {
        active_.erase(pos);
      }
    }
  }

  ArmSet arms_;
  UserSchedule schedule_;
  std::size_t next_event_ = 0;
  std::vector<UserId> active_;
  Round now_ = 0;
  Rng rng_;
};

}  // namespace mpmab
