#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mpmab/bounds.hpp"

using namespace mpmab;
using bounds::Real;

namespace {

double as_d(Real x) { return static_cast<double>(x); }

MegaParams paper_params() { return MegaParams{}; }

}  // namespace

TEST_CASE("learning time frozen values") {
  REQUIRE(bounds::learning_time(2, 2, 0.1L, 0.1L) == 23609.0L);
  REQUIRE(bounds::learning_time(9, 6, 0.1L, 0.05L) == 2234370.0L);
  // K=2, N=1: ceil(16 ln(4/delta)); at delta = 1/2 that is ceil(16 ln 8) = 34
  const Real t = bounds::learning_time(2, 1, 1.0L, 0.5L);
  REQUIRE(t == 34.0L);
  REQUIRE(fabsl(t - 16.0L * logl(8.0L)) <= 1.0L);
}

TEST_CASE("learning time grows with tighter accuracy and confidence") {
  const Real base = bounds::learning_time(2, 2, 0.1L, 0.1L);
  REQUIRE(bounds::learning_time(2, 2, 0.05L, 0.1L) > base);
  REQUIRE(bounds::learning_time(2, 2, 0.1L, 0.01L) > base);
  REQUIRE_THROWS_AS(bounds::learning_time(2, 3, 0.1L, 0.1L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::learning_time(2, 0, 0.1L, 0.1L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::learning_time(2, 2, 0.0L, 0.1L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::learning_time(2, 2, 0.1L, 1.0L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::learning_time(2, 2, 0.1L, 0.0L), std::invalid_argument);
}

TEST_CASE("exploration scale for a target learning time") {
  const Real c = bounds::c_for_learning_time(0.05L, 2, 23609.0L);
  REQUIRE_THAT(as_d(c), Catch::Matchers::WithinRel(14.755625, 1e-12));
  // that scale keeps the schedule saturated through the learning time
  MegaParams p;
  p.c = as_d(c);
  REQUIRE(exploration_probability(p, 2, 23000) == 1.0);
  REQUIRE_THAT(exploration_probability(p, 2, 2 * 23609),
               Catch::Matchers::WithinRel(0.5, 1e-9));
  REQUIRE_THROWS_AS(bounds::c_for_learning_time(0.0L, 2, 100.0L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::c_for_learning_time(0.05L, 1, 100.0L), std::invalid_argument);
}

TEST_CASE("uniform collision probability") {
  REQUIRE(bounds::birthday_collision_prob(1, 5) == 0.0L);
  REQUIRE(bounds::birthday_collision_prob(2, 2) == 0.5L);
  REQUIRE_THAT(as_d(bounds::birthday_collision_prob(3, 9)),
               Catch::Matchers::WithinRel(25.0 / 81.0, 1e-15));
  REQUIRE_THAT(as_d(bounds::birthday_collision_prob(6, 9)),
               Catch::Matchers::WithinRel(0.8861962099273485, 1e-12));
  REQUIRE(bounds::birthday_collision_prob(9, 9) < 1.0L);
  REQUIRE_THROWS_AS(bounds::birthday_collision_prob(3, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::birthday_collision_prob(0, 2), std::invalid_argument);
}

TEST_CASE("collision run lengths at p0 = 0.6") {
  REQUIRE_THAT(as_d(bounds::collision_run_length_upper(0.6L)),
               Catch::Matchers::WithinRel(2.5, 1e-15));
  REQUIRE_THAT(as_d(bounds::collision_run_length_lower(0.6L)),
               Catch::Matchers::WithinRel(1.5625, 1e-15));
  REQUIRE_THROWS_AS(bounds::collision_run_length_upper(1.0L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::collision_run_length_lower(0.0L), std::invalid_argument);
}

TEST_CASE("pairwise and system-wide collision bounds") {
  // coefficient 2 L_up / sqrt(L_low) = 2 * 2.5 / 1.25 = 4 at p0 = 0.6
  REQUIRE_THAT(as_d(bounds::pairwise_collision_bound(1.0L, 0.6L, 0.8L)),
               Catch::Matchers::WithinRel(4.0, 1e-15));
  // t^(1 - beta/2) = 1e5^0.6 = 1000
  REQUIRE_THAT(as_d(bounds::pairwise_collision_bound(1e5L, 0.6L, 0.8L)),
               Catch::Matchers::WithinRel(4000.0, 1e-9));
  REQUIRE_THAT(as_d(bounds::collision_regret_coefficient(0.6L)),
               Catch::Matchers::WithinRel(2.0, 1e-15));
  REQUIRE_THAT(as_d(bounds::total_collision_regret_bound(1e5L, 2, 2, 0.6L, 0.8L)),
               Catch::Matchers::WithinRel(16000.0, 1e-9));
  REQUIRE_THROWS_AS(bounds::pairwise_collision_bound(0.5L, 0.6L, 0.8L), std::invalid_argument);
}

TEST_CASE("forced exploration phase length") {
  // the flagship case: 0.1 * 81 / (0.0025 * 8) sits exactly on 405
  REQUIRE(bounds::exploration_phase_length(0.1L, 9, 0.05L) == 405.0L);
  // binary-exact inputs: 1 * 9 / (0.25 * 2) = 18
  REQUIRE(bounds::exploration_phase_length(1.0L, 3, 0.5L) == 18.0L);
  REQUIRE_THROWS_AS(bounds::exploration_phase_length(0.1L, 1, 0.05L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::exploration_phase_length(0.0L, 9, 0.05L), std::invalid_argument);
}

TEST_CASE("exploration regret") {
  REQUIRE_THAT(as_d(bounds::exploration_regret_value(1e4L, 6, 9, 0.1L, 0.05L)),
               Catch::Matchers::WithinRel(24811.127103902127, 1e-9));
  REQUIRE(bounds::exploration_regret_bound(406.0L, 6, 9, 0.1L, 0.05L) ==
          bounds::exploration_regret_value(406.0L, 6, 9, 0.1L, 0.05L));
  REQUIRE_THROWS_AS(bounds::exploration_regret_bound(405.0L, 6, 9, 0.1L, 0.05L),
                    std::domain_error);
  REQUIRE_THROWS_AS(bounds::exploration_regret_bound(100.0L, 6, 9, 0.1L, 0.05L),
                    std::domain_error);
}

TEST_CASE("availability bound constants at the default parameters") {
  REQUIRE_THAT(as_d(bounds::availability_constant(0.1L, 9, 0.05L, 0.5L)),
               Catch::Matchers::WithinRel(51.5, 1e-12));
  REQUIRE_THAT(as_d(bounds::availability_scale(0.1L, 9, 0.05L, 0.5L)),
               Catch::Matchers::WithinRel(413.0, 1e-12));
  REQUIRE_THROWS_AS(bounds::availability_constant(0.1L, 9, 0.05L, 1.0L), std::invalid_argument);
}

TEST_CASE("availability regret value and validity range") {
  const auto p = paper_params();
  REQUIRE_THAT(as_d(bounds::availability_regret_value(1e4L, 6, 9, 23609.0L, p)),
               Catch::Matchers::WithinRel(36621173.97826777, 1e-9));
  REQUIRE(bounds::availability_regret_bound(1e4L, 6, 9, 23609.0L, p) ==
          bounds::availability_regret_value(1e4L, 6, 9, 23609.0L, p));
  MegaParams shallow = p;
  shallow.beta = 0.5;
  REQUIRE_THROWS_AS(bounds::availability_regret_bound(1e4L, 6, 9, 0.0L, shallow),
                    std::domain_error);
  // beta = 2/3 in double rounds just below the boundary and is rejected too
  shallow.beta = 2.0 / 3.0;
  REQUIRE_THROWS_AS(bounds::availability_regret_bound(1e4L, 6, 9, 0.0L, shallow),
                    std::domain_error);
  REQUIRE_NOTHROW(bounds::availability_regret_value(1e4L, 6, 9, 0.0L, shallow));
}

TEST_CASE("system-wide regret bound") {
  const auto p = paper_params();
  const Real T = 23609.0L;
  REQUIRE_THAT(as_d(bounds::total_regret_value(31623.0L, 6, 9, T, p)),
               Catch::Matchers::WithinRel(90413628.44602905, 1e-9));
  // definitional: the guarded bound is the sum of its three parts
  const Real total = bounds::total_regret_bound(31623.0L, 6, 9, T, p);
  REQUIRE(total == bounds::total_collision_regret_bound(31623.0L, 6, 9, p.p0, p.beta) +
                       bounds::availability_regret_value(31623.0L, 6, 9, T, p) +
                       bounds::exploration_regret_value(31623.0L, 6, 9, p.c, p.d));
  REQUIRE(total == bounds::total_regret_value(31623.0L, 6, 9, T, p));
  // valid only past both the exploration phase and the learning time
  REQUIRE_THROWS_AS(bounds::total_regret_bound(23609.0L, 6, 9, T, p), std::domain_error);
  REQUIRE_THROWS_AS(bounds::total_regret_bound(300.0L, 6, 9, 100.0L, p), std::domain_error);
  REQUIRE_NOTHROW(bounds::total_regret_bound(23610.0L, 6, 9, T, p));
}

TEST_CASE("the regret bound grows like t^beta at large t") {
  const auto p = paper_params();
  const Real lo = bounds::total_regret_value(1e6L, 6, 9, 23609.0L, p);
  const Real hi = bounds::total_regret_value(1e8L, 6, 9, 23609.0L, p);
  const double slope = as_d(logl(hi / lo) / logl(100.0L));
  REQUIRE_THAT(slope, Catch::Matchers::WithinAbs(0.8, 0.01));
  Real prev = 0.0L;
  for (Real t = 500.0L; t <= 1e5L; t *= 2.0L) {
    const Real v = bounds::total_regret_value(t, 6, 9, 23609.0L, p);
    REQUIRE(v > prev);
    prev = v;
  }
}

TEST_CASE("bounds agree with an independent re-derivation") {
  const auto p = paper_params();
  for (int K : {2, 9, 12}) {
    for (int N : {1, 2, 6}) {
      if (N > K) continue;
      for (double t : {1e3, 1e4, 1e5}) {
        const double lup = 1.0 / (1.0 - p.p0);
        const double llow = 1.0 / (1.0 - p.p0 * p.p0);
        const double coll = lup / std::sqrt(llow) * N * N * K * std::pow(t, 1.0 - p.beta / 2.0);
        const double m = p.c * K * K / (p.d * p.d * (K - 1));
        const double expl = N * m * (1.0 + std::log(t));
        const double c2 = 2.0 * p.c * K * K / (p.d * (K - 1)) + (7.0 - 3.0 * p.alpha) / (1.0 - p.alpha);
        const double avail = 1.0 * N * K * 1000.0 + N * K * (1.0 + 8.0 * c2) * std::pow(t, p.beta);
        REQUIRE_THAT(as_d(bounds::total_collision_regret_bound(t, N, K, p.p0, p.beta)),
                     Catch::Matchers::WithinRel(coll, 1e-9));
        REQUIRE_THAT(as_d(bounds::exploration_regret_value(t, N, K, p.c, p.d)),
                     Catch::Matchers::WithinRel(expl, 1e-9));
        REQUIRE_THAT(as_d(bounds::availability_regret_value(t, N, K, 1000.0L, p)),
                     Catch::Matchers::WithinRel(avail, 1e-9));
      }
    }
  }
}

TEST_CASE("settling cost after a departure") {
  REQUIRE(bounds::departure_settling_bound(1000.0L, 1, 0.8L) == 0.0L);
  REQUIRE_THAT(as_d(bounds::departure_settling_bound(1000.0L, 2, 0.8L)),
               Catch::Matchers::WithinRel(251.1886431509581, 1e-9));
  REQUIRE_THAT(as_d(bounds::departure_settling_bound(1000.0L, 3, 0.8L)),
               Catch::Matchers::WithinRel(1125.878302305581, 1e-9));
  REQUIRE_THROWS_AS(bounds::departure_settling_bound(1000.0L, 0, 0.8L), std::invalid_argument);
  REQUIRE_THROWS_AS(bounds::departure_settling_bound(0.5L, 2, 0.8L), std::invalid_argument);
}
