#pragma once

#include <cmath>
#include <stdexcept>

#include "mpmab/mega.hpp"

// Closed-form performance bounds for the MEGA policy. Everything here is a
// stateless pure function evaluated in extended precision; the simulation
// never calls these, they exist for theory overlays, regression tests and
// the CLI's bound calculator.
//
// Two quirks are kept exactly as the analysis prints them:
//   - availability_constant's first term divides by d, not d^2 (see the
//     function comment);
//   - exploration bounds use the natural logarithm, as does everything else.
namespace mpmab::bounds {

using Real = long double;

// Rounds after which every user holds an eps-accurate ranking of the N best
// arms with probability at least 1 - delta:
//   T = 2 * 4 K^N N / (eps^2 * prod_{i=1}^{N-1}(K - i)) * ln(2K / delta),
// rounded up. For N = 1 the product is empty (= 1).
inline Real learning_time(int arm_count, int user_count, Real eps, Real delta) {
  if (user_count < 1 || arm_count < user_count)
    throw std::invalid_argument("learning_time: need K >= N >= 1");
  if (!(eps > 0.0L)) throw std::invalid_argument("learning_time: eps must be positive");
  if (!(delta > 0.0L && delta < 1.0L))
    throw std::invalid_argument("learning_time: delta must lie in (0, 1)");
  Real prod = 1.0L;
  for (int i = 1; i < user_count; ++i) prod *= static_cast<Real>(arm_count - i);
  const Real value = 2.0L * 4.0L * powl(static_cast<Real>(arm_count), user_count) *
                     static_cast<Real>(user_count) / (eps * eps * prod) *
                     logl(2.0L * arm_count / delta);
  return ceill(value);
}

// The exploration scale that keeps eps_t = 1 through the first T rounds:
// c = d^2 (K - 1) T / K^2.
inline Real c_for_learning_time(Real d, int arm_count, Real T) {
  if (arm_count < 2) throw std::invalid_argument("c_for_learning_time: needs at least two arms");
  if (!(d > 0.0L)) throw std::invalid_argument("c_for_learning_time: d must be positive");
  if (!(T >= 0.0L)) throw std::invalid_argument("c_for_learning_time: T must be >= 0");
  return d * d * (arm_count - 1) * T / (static_cast<Real>(arm_count) * arm_count);
}

// Probability that N users independently and uniformly picking among K arms
// produce at least one collision: 1 - prod_{d=1}^{N-1}(1 - d/K).
inline Real birthday_collision_prob(int user_count, int arm_count) {
  if (user_count < 1 || arm_count < user_count)
    throw std::invalid_argument("birthday_collision_prob: need 1 <= N <= K");
  Real prod = 1.0L;
  for (int d = 1; d < user_count; ++d)
    prod *= 1.0L - static_cast<Real>(d) / static_cast<Real>(arm_count);
  return 1.0L - prod;
}

// Upper and lower bounds on the expected length of one collision run
// between two persisting users.
inline Real collision_run_length_upper(Real p0) {
  if (!(p0 > 0.0L && p0 < 1.0L))
    throw std::invalid_argument("collision_run_length_upper: p0 must lie in (0, 1)");
  return 1.0L / (1.0L - p0);
}

inline Real collision_run_length_lower(Real p0) {
  if (!(p0 > 0.0L && p0 < 1.0L))
    throw std::invalid_argument("collision_run_length_lower: p0 must lie in (0, 1)");
  return 1.0L / (1.0L - p0 * p0);
}

// Expected number of collisions between one pair of users on one arm up to
// round t: (2 L_up / sqrt(L_low)) * t^(1 - beta/2).
inline Real pairwise_collision_bound(Real t, Real p0, Real beta) {
  if (!(t >= 1.0L)) throw std::invalid_argument("pairwise_collision_bound: t must be >= 1");
  return 2.0L * collision_run_length_upper(p0) / sqrtl(collision_run_length_lower(p0)) *
         powl(t, 1.0L - beta / 2.0L);
}

// Per-unit coefficient of the system-wide collision regret bound.
inline Real collision_regret_coefficient(Real p0) {
  return collision_run_length_upper(p0) / sqrtl(collision_run_length_lower(p0));
}

// Regret from collisions between all users over all arms up to round t:
// coefficient * N^2 K * t^(1 - beta/2). For N = 1 this echoes the formula
// literally even though a lone user never collides.
inline Real total_collision_regret_bound(Real t, int user_count, int arm_count, Real p0,
                                         Real beta) {
  if (!(t >= 1.0L)) throw std::invalid_argument("total_collision_regret_bound: t must be >= 1");
  if (user_count < 0 || arm_count < 1)
    throw std::invalid_argument("total_collision_regret_bound: bad counts");
  return collision_regret_coefficient(p0) * static_cast<Real>(user_count) * user_count *
         arm_count * powl(t, 1.0L - beta / 2.0L);
}

// Length of the forced exploration phase (eps_t pinned at 1):
// ceil(c K^2 / (d^2 (K - 1))). The operand order below is load-bearing: it
// keeps the extended-precision value at the default parameters (c=0.1,
// d=0.05, K=9 gives 405) exactly on the integer, so the ceiling does not
// overshoot.
inline Real exploration_phase_length(Real c, int arm_count, Real d) {
  if (arm_count < 2)
    throw std::invalid_argument("exploration_phase_length: needs at least two arms");
  if (!(c > 0.0L) || !(d > 0.0L))
    throw std::invalid_argument("exploration_phase_length: c and d must be positive");
  return ceill(c * arm_count * arm_count / (d * d * (arm_count - 1)));
}

// Regret from random exploration up to round t, unguarded:
// N m + (c K^2 N / (d^2 (K - 1))) ln t with m = c K^2 / (d^2 (K - 1)).
inline Real exploration_regret_value(Real t, int user_count, int arm_count, Real c, Real d) {
  if (arm_count < 2)
    throw std::invalid_argument("exploration_regret_value: needs at least two arms");
  if (user_count < 0) throw std::invalid_argument("exploration_regret_value: N must be >= 0");
  const Real m = c * arm_count * arm_count / (d * d * (arm_count - 1));
  return static_cast<Real>(user_count) * m + m * static_cast<Real>(user_count) * logl(t);
}

// Same, valid only past the forced exploration phase.
inline Real exploration_regret_bound(Real t, int user_count, int arm_count, Real c, Real d) {
  if (!(t > exploration_phase_length(c, arm_count, d)))
    throw std::domain_error("exploration_regret_bound: valid only for t past the forced exploration phase");
  return exploration_regret_value(t, user_count, arm_count, c, d);
}

// Growth constant of the backoff machinery, exactly as the analysis prints
// it: 2 c K^2 / (d (K - 1)) + (7 - 3 alpha) / (1 - alpha). Note the first
// term divides by d where the exploration schedule divides by d^2; the
// printed form is kept deliberately.
inline Real availability_constant(Real c, int arm_count, Real d, Real alpha) {
  if (arm_count < 2) throw std::invalid_argument("availability_constant: needs at least two arms");
  if (!(alpha > 0.0L && alpha < 1.0L))
    throw std::invalid_argument("availability_constant: alpha must lie in (0, 1)");
  return 2.0L * c * arm_count * arm_count / (d * (arm_count - 1)) +
         (7.0L - 3.0L * alpha) / (1.0L - alpha);
}

inline Real availability_scale(Real c, int arm_count, Real d, Real alpha) {
  return 1.0L + 8.0L * availability_constant(c, arm_count, d, alpha);
}

// Regret from arms sitting in backoff, unguarded: N K T + N K C3 t^beta.
inline Real availability_regret_value(Real t, int user_count, int arm_count, Real T,
                                      const MegaParams& params) {
  if (!(t >= 1.0L)) throw std::invalid_argument("availability_regret_value: t must be >= 1");
  if (!(T >= 0.0L)) throw std::invalid_argument("availability_regret_value: T must be >= 0");
  const Real scale = availability_scale(params.c, arm_count, params.d, params.alpha);
  return static_cast<Real>(user_count) * arm_count * T +
         static_cast<Real>(user_count) * arm_count * scale * powl(t, params.beta);
}

// Same, restricted to the exponent range where the derivation holds.
inline Real availability_regret_bound(Real t, int user_count, int arm_count, Real T,
                                      const MegaParams& params) {
  if (!(static_cast<Real>(params.beta) > 2.0L / 3.0L))
    throw std::domain_error("availability_regret_bound: outside validity (beta <= 2/3)");
  return availability_regret_value(t, user_count, arm_count, T, params);
}

// System-wide regret bound, unguarded: collision + availability +
// exploration terms. Useful for evaluating the beta = 2/3 optimizer, which
// sits exactly on the availability bound's validity boundary.
inline Real total_regret_value(Real t, int user_count, int arm_count, Real T,
                               const MegaParams& params) {
  return total_collision_regret_bound(t, user_count, arm_count, params.p0, params.beta) +
         availability_regret_value(t, user_count, arm_count, T, params) +
         exploration_regret_value(t, user_count, arm_count, params.c, params.d);
}

// System-wide regret bound for t past both the forced exploration phase and
// the learning time, with beta in the availability bound's validity range.
// Minimizing the dominant exponents max(1 - beta/2, beta) gives beta = 2/3.
inline Real total_regret_bound(Real t, int user_count, int arm_count, Real T,
                               const MegaParams& params) {
  const Real m = exploration_phase_length(params.c, arm_count, params.d);
  if (!(t > m && t > T))
    throw std::domain_error(
        "total_regret_bound: valid only for t past the exploration phase and the learning time");
  return total_collision_regret_bound(t, user_count, arm_count, params.p0, params.beta) +
         availability_regret_bound(t, user_count, arm_count, T, params) +
         exploration_regret_bound(t, user_count, arm_count, params.c, params.d);
}

// Regret accumulated between a departure at round t and the remaining
// n_after users settling into the new optimal configuration:
// (2^((beta+1)(n_after-1)) - 1) / (2^(beta+1) - 1) * t^beta.
inline Real departure_settling_bound(Real t, int n_after, Real beta) {
  if (n_after < 1) throw std::invalid_argument("departure_settling_bound: n_after must be >= 1");
  if (!(t >= 1.0L)) throw std::invalid_argument("departure_settling_bound: t must be >= 1");
  const Real g = powl(2.0L, beta + 1.0L);
  return (powl(2.0L, (beta + 1.0L) * (n_after - 1)) - 1.0L) / (g - 1.0L) * powl(t, beta);
}

}  // namespace mpmab::bounds
