#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpmab/env.hpp"
#include "mpmab/metrics.hpp"
#include "mpmab/rng.hpp"

using namespace mpmab;

namespace {

const std::vector<double> kMu{0.9, 0.5, 0.1};

RoundOutcome round_with(std::vector<UserOutcome> users) {
  RoundOutcome r;
  r.time = 1;
  r.users = std::move(users);
  return r;
}

}  // namespace

TEST_CASE("optimal set picks the largest means, ties toward lower indices") {
  REQUIRE(optimal_set(kMu, 2) == std::vector<ArmIndex>{0, 1});
  REQUIRE(optimal_set(kMu, 0).empty());
  REQUIRE(optimal_set(kMu, 3) == std::vector<ArmIndex>{0, 1, 2});
  const std::vector<double> tied{0.3, 0.9, 0.9, 0.1};
  REQUIRE(optimal_set(tied, 2) == std::vector<ArmIndex>{1, 2});
  REQUIRE(optimal_set(tied, 3) == std::vector<ArmIndex>{0, 1, 2});
  REQUIRE_THROWS_AS(optimal_set(kMu, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(optimal_set(kMu, -1), std::invalid_argument);
  REQUIRE_THAT(optimal_round_value(kMu, 2), Catch::Matchers::WithinAbs(1.4, 1e-15));
}

TEST_CASE("pseudo-regret counts only collision-free transmissions") {
  // both users collide: the full optimal value is lost
  auto all_collide = round_with({{0, 1, 0.0, true}, {1, 1, 0.0, true}});
  REQUIRE_THAT(pseudo_regret_increment(kMu, all_collide),
               Catch::Matchers::WithinAbs(1.4, 1e-15));
  // arms 0 and 2 collision-free: 1.4 - (0.9 + 0.1)
  auto suboptimal = round_with({{0, 0, 1.0, false}, {1, 2, 0.0, false}});
  REQUIRE_THAT(pseudo_regret_increment(kMu, suboptimal),
               Catch::Matchers::WithinAbs(0.4, 1e-15));
  // the optimal arms, in either assignment
  auto optimal = round_with({{0, 1, 0.0, false}, {1, 0, 1.0, false}});
  REQUIRE_THAT(pseudo_regret_increment(kMu, optimal), Catch::Matchers::WithinAbs(0.0, 1e-15));
  // a refraining user contributes nothing
  auto one_silent = round_with({{0, 0, 1.0, false}, {1, std::nullopt, 0.0, false}});
  REQUIRE_THAT(pseudo_regret_increment(kMu, one_silent),
               Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("realized regret uses drawn rewards and may dip negative") {
  auto lucky = round_with({{0, 0, 1.0, false}, {1, 1, 1.0, false}});
  REQUIRE_THAT(realized_regret_increment(kMu, lucky),
               Catch::Matchers::WithinAbs(-0.6, 1e-15));
  auto all_collide = round_with({{0, 1, 0.0, true}, {1, 1, 0.0, true}});
  REQUIRE(realized_regret_increment(kMu, all_collide) ==
          pseudo_regret_increment(kMu, all_collide));
}

TEST_CASE("realized regret matches pseudo-regret in expectation") {
  ArmSet arms{kMu};
  Environment env(arms, UserSchedule::fixed_users(2), 99);
  double pseudo = 0.0, realized = 0.0;
  const Round horizon = 100000;
  for (Round t = 1; t <= horizon; ++t) {
    const auto out = env.resolve_round({{0, 0}, {1, 2}});
    pseudo += pseudo_regret_increment(kMu, out);
    realized += realized_regret_increment(kMu, out);
  }
  // Var(reward sum) = t (0.09 + 0.09), three sigmas ~ 402
  REQUIRE_THAT(realized, Catch::Matchers::WithinAbs(pseudo, 3.0 * std::sqrt(horizon * 0.18)));
}

TEST_CASE("zero-regret rounds need collision freedom and the optimal arms") {
  auto good = round_with({{0, 1, 0.0, false}, {1, 0, 1.0, false}});
  REQUIRE(zero_regret_round(kMu, good));
  auto wrong_set = round_with({{0, 0, 1.0, false}, {1, 2, 0.0, false}});
  REQUIRE_FALSE(zero_regret_round(kMu, wrong_set));
  auto collision = round_with({{0, 0, 0.0, true}, {1, 0, 0.0, true}});
  REQUIRE_FALSE(zero_regret_round(kMu, collision));
  auto silent = round_with({{0, 0, 1.0, false}, {1, std::nullopt, 0.0, false}});
  REQUIRE_FALSE(zero_regret_round(kMu, silent));
}

TEST_CASE("aggregating a single trace gives zero spread") {
  RegretTrace tr;
  tr.times = {100, 200};
  tr.pseudo_cum = {3.0, 5.0};
  tr.realized_cum = {2.5, 6.0};
  tr.user_collisions_cum = {{4, 0}, {6, 2}};
  tr.optimal_rounds_cum = {10, 50};
  const auto agg = aggregate({tr});
  REQUIRE(agg.repetitions == 1);
  REQUIRE(agg.times == tr.times);
  REQUIRE(agg.pseudo_mean == tr.pseudo_cum);
  REQUIRE(agg.pseudo_std == std::vector<double>{0.0, 0.0});
  REQUIRE(agg.realized_mean == tr.realized_cum);
  // (4 + 0) / 2 and (6 + 2) / 2
  REQUIRE(agg.collisions_per_user_mean == std::vector<double>{2.0, 4.0});
  REQUIRE(agg.collisions_per_user_std == std::vector<double>{0.0, 0.0});
}

TEST_CASE("aggregate means and population spread across repetitions") {
  RegretTrace a, b;
  a.times = b.times = {10};
  a.pseudo_cum = {0.0};
  b.pseudo_cum = {2.0};
  a.realized_cum = {1.0};
  b.realized_cum = {3.0};
  a.user_collisions_cum = {{2, 2}};
  b.user_collisions_cum = {{0, 0}};
  a.optimal_rounds_cum = b.optimal_rounds_cum = {0};
  const auto agg = aggregate({a, b});
  REQUIRE(agg.repetitions == 2);
  REQUIRE(agg.pseudo_mean == std::vector<double>{1.0});
  REQUIRE(agg.pseudo_std == std::vector<double>{1.0});  // population, not sample
  REQUIRE(agg.realized_mean == std::vector<double>{2.0});
  REQUIRE(agg.collisions_per_user_mean == std::vector<double>{1.0});
  REQUIRE(agg.collisions_per_user_std == std::vector<double>{1.0});
}

TEST_CASE("spread of coin-flip traces sits near one") {
  Rng rng(7);
  std::vector<RegretTrace> traces(50);
  for (auto& tr : traces) {
    tr.times = {10};
    tr.pseudo_cum = {rng.bernoulli(0.5) ? 2.0 : 0.0};
    tr.realized_cum = {0.0};
    tr.user_collisions_cum = {{0}};
    tr.optimal_rounds_cum = {0};
  }
  const auto agg = aggregate(traces);
  REQUIRE(agg.pseudo_std[0] > 0.7);
  REQUIRE(agg.pseudo_std[0] < 1.3);
}

TEST_CASE("aggregate rejects empty or misaligned inputs") {
  REQUIRE_THROWS_AS(aggregate({}), std::invalid_argument);
  RegretTrace a, b;
  a.times = {10};
  b.times = {20};
  a.pseudo_cum = b.pseudo_cum = {0.0};
  a.realized_cum = b.realized_cum = {0.0};
  a.user_collisions_cum = b.user_collisions_cum = {{0}};
  a.optimal_rounds_cum = b.optimal_rounds_cum = {0};
  REQUIRE_THROWS_AS(aggregate({a, b}), std::invalid_argument);
}
