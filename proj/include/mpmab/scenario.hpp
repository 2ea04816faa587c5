#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpmab/baselines.hpp"
#include "mpmab/env.hpp"
#include "mpmab/mega.hpp"
#include "mpmab/metrics.hpp"

namespace mpmab {

enum class PolicyKind { kMega, kEpsilonGreedy, kUcb1, kKlUcb, kRhoRand };

inline const char* policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMega: return "mega";
    case PolicyKind::kEpsilonGreedy: return "egreedy";
    case PolicyKind::kUcb1: return "ucb1";
    case PolicyKind::kKlUcb: return "klucb";
    case PolicyKind::kRhoRand: return "rho_rand";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "mega") return PolicyKind::kMega;
  if (name == "egreedy") return PolicyKind::kEpsilonGreedy;
  if (name == "ucb1") return PolicyKind::kUcb1;
  if (name == "klucb") return PolicyKind::kKlUcb;
  if (name == "rho_rand") return PolicyKind::kRhoRand;
  return std::nullopt;
}

// Which decision rule every user runs, plus its parameters. Only the fields
// for the selected kind matter.
struct PolicySpec {
  PolicyKind kind = PolicyKind::kMega;
  MegaParams mega{};
  double explore_c = 0.1;  // epsilon-greedy schedule scale
  double explore_d = 0.05;
  int rho_users = 1;  // the N that rho_rand is told

  bool operator==(const PolicySpec&) const = default;
};

// A complete, reproducible experiment: (Scenario, repetition index) fully
// determines a run.
struct Scenario {
  std::string name = "custom";
  ArmSet arms;
  UserSchedule schedule;
  Round horizon = 100000;
  int repetitions = 1;
  Round stride = 100;
  std::uint64_t master_seed = 1729;
  PolicySpec policy;

  bool operator==(const Scenario&) const = default;

  int arm_count() const { return arms.size(); }
  int user_slots() const { return schedule.user_slots(); }

  void validate() const {
    arms.validate();
    schedule.validate(arms.size());
    if (horizon < 0) throw std::invalid_argument("Scenario: horizon must be >= 0");
    if (repetitions < 1) throw std::invalid_argument("Scenario: repetitions must be >= 1");
    if (stride < 1) throw std::invalid_argument("Scenario: stride must be >= 1");
    switch (policy.kind) {
      case PolicyKind::kMega: {
        policy.mega.validate();
        if (arms.size() < 2)
          throw std::invalid_argument("Scenario: the mega policy needs at least two arms");
        // The analysis assumes distinguishable arms: all pairwise gaps among
        // the top-(N+1) means must be at least d.
        const int top = std::min(schedule.peak_active() + 1, arms.size());
        std::vector<double> mu_sorted(arms.mu);
        std::sort(mu_sorted.begin(), mu_sorted.end(), std::greater<>());
        for (int i = 0; i + 1 < top; ++i)
          if (mu_sorted[static_cast<std::size_t>(i)] - mu_sorted[static_cast<std::size_t>(i + 1)] <
              policy.mega.d - 1e-12)
            throw std::invalid_argument(
                "Scenario: mu gaps among the contended arms must be >= the policy's d");
        break;
      }
      case PolicyKind::kEpsilonGreedy:
        if (!(policy.explore_c > 0.0))
          throw std::invalid_argument("Scenario: egreedy c must be positive");
        if (!(policy.explore_d > 0.0))
          throw std::invalid_argument("Scenario: egreedy d must be positive");
        break;
      case PolicyKind::kUcb1:
      case PolicyKind::kKlUcb:
        break;
      case PolicyKind::kRhoRand:
        if (policy.rho_users < 1 || policy.rho_users > arms.size())
          throw std::invalid_argument("Scenario: rho_rand user count must lie in [1, K]");
        break;
    }
  }
};

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int arm_count) {
  switch (spec.kind) {
    case PolicyKind::kMega:
      return std::make_unique<MegaPolicy>(arm_count, spec.mega);
    case PolicyKind::kEpsilonGreedy:
      return std::make_unique<EpsilonGreedyPolicy>(arm_count, spec.explore_c, spec.explore_d);
    case PolicyKind::kUcb1:
      return std::make_unique<Ucb1Policy>(arm_count);
    case PolicyKind::kKlUcb:
      return std::make_unique<KlUcbPolicy>(arm_count);
    case PolicyKind::kRhoRand:
      return std::make_unique<RhoRandPolicy>(arm_count, spec.rho_users);
  }
  throw std::logic_error("make_policy: unknown policy kind");
}

// Arm means for the presets: evenly spaced across [0.1, 0.9], best arm
// first. The spacing keeps all gaps >= 0.05 for K <= 16.
inline std::vector<double> evenly_spaced_means(int arm_count) {
  if (arm_count < 1) throw std::invalid_argument("evenly_spaced_means: needs at least one arm");
  if (arm_count == 1) return {0.5};
  std::vector<double> mu(static_cast<std::size_t>(arm_count));
  for (int k = 0; k < arm_count; ++k)
    mu[static_cast<std::size_t>(k)] = 0.9 - 0.8 * k / (arm_count - 1);
  return mu;
}

// fig5's arrival/departure ladder: population 1 -> 2 -> 3 -> 4 -> 3 -> 2 -> 1
// with change events at multiples of horizon/7 and last-in-first-out
// departures.
inline UserSchedule ladder_schedule(Round horizon) {
  const Round step = std::max<Round>(1, horizon / 7);
  UserSchedule s;
  s.events.push_back({1, 0, true});
  for (UserId u = 1; u <= 3; ++u) s.events.push_back({u * step, u, true});
  for (UserId u = 3; u >= 1; --u) s.events.push_back({(7 - u) * step, u, false});
  s.canonicalize();
  return s;
}

inline std::vector<std::string> preset_names() {
  return {"fig2",        "fig2_klucb", "fig2_egreedy", "fig3",    "fig3_rhorand",
          "fig4",        "fig4_rhorand", "fig5",       "fig5_rhorand", "departure"};
}

inline std::string preset_description(const std::string& name) {
  if (name == "fig2") return "2 users, 2 arms, mega";
  if (name == "fig2_klucb") return "2 users, 2 arms, every user runs plain kl-ucb";
  if (name == "fig2_egreedy") return "2 users, 2 arms, every user runs plain epsilon-greedy";
  if (name == "fig3") return "6 users, 9 arms, mega";
  if (name == "fig3_rhorand") return "6 users, 9 arms, rho_rand told n=6";
  if (name == "fig4") return "12 users, 12 arms, mega";
  if (name == "fig4_rhorand") return "12 users, 12 arms, rho_rand told n=12";
  if (name == "fig5") return "dynamic population 1->4->1 on 12 arms, mega";
  if (name == "fig5_rhorand") return "dynamic population 1->4->1 on 12 arms, rho_rand told n=2";
  if (name == "departure") return "3 users on 5 arms, user 2 departs at round 5000";
  throw std::invalid_argument("unknown preset: " + name);
}

// Fully populated experiment for a preset name. The optional horizon
// override also moves fig5's schedule events, which sit at multiples of
// horizon/7.
inline Scenario preset(const std::string& name, std::optional<Round> horizon = std::nullopt) {
  Scenario s;
  s.name = name;
  s.stride = 100;
  s.master_seed = 1729;
  auto finish = [&](int arm_count, Round default_horizon, int reps) {
    s.arms.mu = evenly_spaced_means(arm_count);
    s.horizon = horizon.value_or(default_horizon);
    s.repetitions = reps;
  };
  if (name == "fig2" || name == "fig2_klucb" || name == "fig2_egreedy") {
    finish(2, 100000, 50);
    s.schedule = UserSchedule::fixed_users(2);
    if (name == "fig2_klucb") s.policy.kind = PolicyKind::kKlUcb;
    if (name == "fig2_egreedy") s.policy.kind = PolicyKind::kEpsilonGreedy;
  } else if (name == "fig3" || name == "fig3_rhorand") {
    finish(9, 100000, 50);
    s.schedule = UserSchedule::fixed_users(6);
    if (name == "fig3_rhorand") {
      s.policy.kind = PolicyKind::kRhoRand;
      s.policy.rho_users = 6;
    }
  } else if (name == "fig4" || name == "fig4_rhorand") {
    finish(12, 100000, 50);
    s.schedule = UserSchedule::fixed_users(12);
    if (name == "fig4_rhorand") {
      s.policy.kind = PolicyKind::kRhoRand;
      s.policy.rho_users = 12;
    }
  } else if (name == "fig5" || name == "fig5_rhorand") {
    finish(12, 100000, 20);
    s.schedule = ladder_schedule(s.horizon);
    if (name == "fig5_rhorand") {
      s.policy.kind = PolicyKind::kRhoRand;
      s.policy.rho_users = 2;
    }
  } else if (name == "departure") {
    finish(5, 12000, 20);
    s.schedule = UserSchedule::fixed_users(3);
    s.schedule.events.push_back({5000, 2, false});
    s.schedule.canonicalize();
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  s.validate();
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t' || sv.front() == '\r'))
    sv.remove_prefix(1);
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
    sv.remove_suffix(1);
  return sv;
}

inline std::vector<std::string_view> split_ws(std::string_view sv) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < sv.size()) {
    while (i < sv.size() && (sv[i] == ' ' || sv[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < sv.size() && sv[j] != ' ' && sv[j] != '\t') ++j;
    if (j > i) out.push_back(sv.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_double_or_throw(std::string_view sv, const std::string& what) {
  std::string buf(sv);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw std::invalid_argument("config: bad number for " + what + ": '" + buf + "'");
  return v;
}

template <typename Int>
Int parse_int_or_throw(std::string_view sv, const std::string& what) {
  Int v{};
  const auto* first = sv.data();
  const auto* last = sv.data() + sv.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: bad integer for " + what + ": '" + std::string(sv) + "'");
  return v;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Renders a scenario as the flat key = value config document described in
// the README. parse_scenario inverts it exactly.
inline std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "# mpmab scenario\n";
  out << "name = " << s.name << "\n";
  out << "seed = " << s.master_seed << "\n";
  out << "horizon = " << s.horizon << "\n";
  out << "repetitions = " << s.repetitions << "\n";
  out << "stride = " << s.stride << "\n";
  out << "arms =";
  for (double m : s.arms.mu) out << " " << detail::fmt_double(m);
  out << "\n";
  out << "schedule =";
  for (const auto& e : s.schedule.events)
    out << " " << (e.joins ? "join" : "leave") << ":" << e.user << "@" << e.time;
  out << "\n";
  out << "policy = " << policy_kind_name(s.policy.kind);
  switch (s.policy.kind) {
    case PolicyKind::kMega:
      out << " c=" << detail::fmt_double(s.policy.mega.c)
          << " d=" << detail::fmt_double(s.policy.mega.d)
          << " p0=" << detail::fmt_double(s.policy.mega.p0)
          << " alpha=" << detail::fmt_double(s.policy.mega.alpha)
          << " beta=" << detail::fmt_double(s.policy.mega.beta);
      break;
    case PolicyKind::kEpsilonGreedy:
      out << " c=" << detail::fmt_double(s.policy.explore_c)
          << " d=" << detail::fmt_double(s.policy.explore_d);
      break;
    case PolicyKind::kRhoRand:
      out << " n=" << s.policy.rho_users;
      break;
    case PolicyKind::kUcb1:
    case PolicyKind::kKlUcb:
      break;
  }
  out << "\n";
  return out.str();
}

inline PolicySpec parse_policy_spec(std::string_view text) {
  const auto tokens = detail::split_ws(text);
  if (tokens.empty()) throw std::invalid_argument("config: policy line is empty");
  PolicySpec spec;
  const auto kind = parse_policy_kind(tokens[0]);
  if (!kind) throw std::invalid_argument("config: unknown policy '" + std::string(tokens[0]) + "'");
  spec.kind = *kind;
  bool saw_rho_n = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto tok = tokens[i];
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config: expected key=value in policy, got '" + std::string(tok) + "'");
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    auto num = [&] { return detail::parse_double_or_throw(value, "policy " + std::string(key)); };
    if (spec.kind == PolicyKind::kMega) {
      if (key == "c") spec.mega.c = num();
      else if (key == "d") spec.mega.d = num();
      else if (key == "p0") spec.mega.p0 = num();
      else if (key == "alpha") spec.mega.alpha = num();
      else if (key == "beta") spec.mega.beta = num();
      else throw std::invalid_argument("config: unknown mega parameter '" + std::string(key) + "'");
    } else if (spec.kind == PolicyKind::kEpsilonGreedy) {
      if (key == "c") spec.explore_c = num();
      else if (key == "d") spec.explore_d = num();
      else throw std::invalid_argument("config: unknown egreedy parameter '" + std::string(key) + "'");
    } else if (spec.kind == PolicyKind::kRhoRand) {
      if (key == "n") {
        spec.rho_users = detail::parse_int_or_throw<int>(value, "policy n");
        saw_rho_n = true;
      } else {
        throw std::invalid_argument("config: unknown rho_rand parameter '" + std::string(key) + "'");
      }
    } else {
      throw std::invalid_argument("config: policy '" + std::string(tokens[0]) + "' takes no parameters");
    }
  }
  if (spec.kind == PolicyKind::kRhoRand && !saw_rho_n)
    throw std::invalid_argument("config: rho_rand requires n=<user count>");
  return spec;
}

// Parses the config document format. Unknown keys, duplicate keys and
// malformed values are all errors; schedule and arms and policy are
// required, everything else falls back to Scenario defaults.
inline Scenario parse_scenario(std::string_view text) {
  Scenario s;
  bool saw_arms = false, saw_schedule = false, saw_policy = false;
  std::vector<std::string> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key{detail::trim(line.substr(0, eq))};
    const auto value = detail::trim(line.substr(eq + 1));
    for (const auto& k : seen)
      if (k == key)
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    seen.push_back(key);
    if (key == "name") {
      s.name = std::string(value);
    } else if (key == "seed") {
      s.master_seed = detail::parse_int_or_throw<std::uint64_t>(value, key);
    } else if (key == "horizon") {
      s.horizon = detail::parse_int_or_throw<Round>(value, key);
    } else if (key == "repetitions") {
      s.repetitions = detail::parse_int_or_throw<int>(value, key);
    } else if (key == "stride") {
      s.stride = detail::parse_int_or_throw<Round>(value, key);
    } else if (key == "arms") {
      s.arms.mu.clear();
      for (const auto tok : detail::split_ws(value))
        s.arms.mu.push_back(detail::parse_double_or_throw(tok, "arms"));
      saw_arms = true;
    } else if (key == "schedule") {
      s.schedule.events.clear();
      for (const auto tok : detail::split_ws(value)) {
        const auto colon = tok.find(':');
        const auto at = tok.find('@');
        if (colon == std::string_view::npos || at == std::string_view::npos || at < colon)
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": schedule entries look like join:<user>@<round>");
        const auto verb = tok.substr(0, colon);
        if (verb != "join" && verb != "leave")
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": schedule verb must be join or leave");
        ScheduleEvent e;
        e.joins = verb == "join";
        e.user = detail::parse_int_or_throw<UserId>(tok.substr(colon + 1, at - colon - 1), "schedule user");
        e.time = detail::parse_int_or_throw<Round>(tok.substr(at + 1), "schedule round");
        s.schedule.events.push_back(e);
      }
      saw_schedule = true;
    } else if (key == "policy") {
      s.policy = parse_policy_spec(value);
      saw_policy = true;
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!saw_arms) throw std::invalid_argument("config: missing 'arms'");
  if (!saw_schedule) throw std::invalid_argument("config: missing 'schedule'");
  if (!saw_policy) throw std::invalid_argument("config: missing 'policy'");
  s.validate();
  return s;
}

}  // namespace mpmab
