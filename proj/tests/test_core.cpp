#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "oracles.hpp"
#include "revpref/core.hpp"
#include "revpref/rng.hpp"

using namespace revpref;

TEST_CASE("make_dataset validates rows and preserves order") {
  const auto ds = make_dataset({{{1, 2}, {0, 1}}, {{2, 1}, {1, 0}}});
  CHECK(ds.rounds() == 2);
  CHECK(ds.goods() == 2);
  CHECK(ds.observations[0].bundle[1] == 1.0);

  CHECK_THROWS_WITH_AS(make_dataset({{{1, 2}, {0, 1}}, {{0, 1}, {1, 1}}}),
                       "non-positive price at row 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_dataset({{{1, 2}, {0, 1}}, {{1, 2, 3}, {1, 0, 0}}}),
                       "dimension mismatch at row 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_dataset({{{1, 2}, {-0.5, 1}}}),
                       "negative quantity at row 0", std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_dataset({{{1, 2}, {0, 0}}}),
                       "zero expenditure at row 0", std::invalid_argument);
  CHECK_THROWS_AS(make_dataset({}), std::invalid_argument);
}

TEST_CASE("expenditure is the dot product") {
  Observation a{"a", {1, 2}, {0, 1}};
  Observation b{"b", {2, 1}, {3, 1}};
  Observation c{"c", {10, 20}, {0, 5}};
  CHECK(expenditure(a) == doctest::Approx(2.0));
  CHECK(expenditure(b) == doctest::Approx(7.0));
  CHECK(expenditure(c) == doctest::Approx(100.0));
}

TEST_CASE("direct relations on the worked micro-dataset") {
  const auto ds = oracles::dagger();

  SUBCASE("mutual strict preference at e = 1") {
    const auto rel = direct_relations(ds, 1.0);
    CHECK(rel.strict_at(0, 1));
    CHECK(rel.strict_at(1, 0));
    CHECK(rel.weak_at(0, 0));
    CHECK(rel.weak_at(1, 1));
  }
  SUBCASE("no relations at e = 0") {
    const auto rel = direct_relations(ds, 0.0);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK_FALSE(rel.weak_at(i, j));
    }
  }
  SUBCASE("weak but not strict at the 0.5 threshold") {
    const auto rel = direct_relations(ds, 0.5);
    CHECK(rel.weak_at(0, 1));
    CHECK(rel.weak_at(1, 0));
    CHECK_FALSE(rel.strict_at(0, 1));
    CHECK_FALSE(rel.strict_at(1, 0));
  }
  SUBCASE("rejects out-of-range efficiency") {
    CHECK_THROWS_AS(direct_relations(ds, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(direct_relations(ds, -0.1), std::invalid_argument);
  }
}

TEST_CASE("transitive closure composes paths") {
  // chain 0 -> 1 -> 2 only
  const auto ds = make_dataset({{{1, 1}, {3, 3}}, {{1, 1}, {2, 2}}, {{1, 1}, {1, 1}}});
  const auto rel = transitive_closure(direct_relations(ds, 1.0));
  CHECK(rel.closure_at(0, 2));
  CHECK_FALSE(rel.closure_at(2, 0));

  SUBCASE("diagonal only when nothing is cross-affordable") {
    // each bundle sits at the corner the other budget cannot reach
    const auto iso = make_dataset({{{2, 1}, {0, 2}}, {{1, 2}, {2, 0}}});
    const auto r = transitive_closure(direct_relations(iso, 1.0));
    CHECK(r.closure_at(0, 0));
    CHECK(r.closure_at(1, 1));
    CHECK_FALSE(r.closure_at(0, 1));
    CHECK_FALSE(r.closure_at(1, 0));
  }
  SUBCASE("complete closure for the mutual-violation pair") {
    const auto r = transitive_closure(direct_relations(oracles::dagger(), 1.0));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(r.closure_at(i, j));
    }
  }
}

TEST_CASE("closure is idempotent on random instances") {
  Rng rng(20240601, "core-idempotent");
  for (int rep = 0; rep < 50; ++rep) {
    const auto ds = oracles::random_small(rng);
    const auto once = transitive_closure(direct_relations(ds, 1.0));
    const auto twice = transitive_closure(once);
    CHECK(once.closure == twice.closure);
  }
}

namespace {

bool same_relations(const RelationMatrix& a, const RelationMatrix& b) {
  return a.weak == b.weak && a.strict == b.strict;
}

}  // namespace

TEST_CASE("relations are invariant to admissible rescalings") {
  Rng rng(555, "core-scaling");
  for (int rep = 0; rep < 40; ++rep) {
    const auto ds = oracles::random_small(rng);
    const double levels[] = {0.0, 0.3, 0.5, 0.8, 1.0};
    for (double e : levels) {
      const auto base = direct_relations(ds, e);

      // one global multiplier on every price
      ChoiceDataset global = ds;
      for (auto& obs : global.observations) {
        for (double& p : obs.prices) p *= 3.0;
      }
      CHECK(same_relations(base, direct_relations(global, e)));

      // per-observation price multipliers
      ChoiceDataset per_obs = ds;
      double lambda = 0.5;
      for (auto& obs : per_obs.observations) {
        for (double& p : obs.prices) p *= lambda;
        lambda += 0.75;
      }
      CHECK(same_relations(base, direct_relations(per_obs, e)));

      // per-good unit change: price up, quantity down by the same factor
      ChoiceDataset units = ds;
      const double unit[2] = {4.0, 0.25};
      for (auto& obs : units.observations) {
        for (int g = 0; g < 2; ++g) {
          obs.prices[g] *= unit[g];
          obs.bundle[g] /= unit[g];
        }
      }
      CHECK(same_relations(base, direct_relations(units, e)));
    }
  }
}

TEST_CASE("relations grow with the efficiency level") {
  Rng rng(777, "core-monotone");
  for (int rep = 0; rep < 40; ++rep) {
    const auto ds = oracles::random_small(rng);
    const double lo = rng.next_double();
    const double hi = lo + (1.0 - lo) * rng.next_double();
    const auto small = direct_relations(ds, lo);
    const auto large = direct_relations(ds, hi);
    for (std::size_t idx = 0; idx < small.weak.size(); ++idx) {
      if (small.weak[idx]) CHECK(large.weak[idx]);
      if (small.strict[idx]) CHECK(large.strict[idx]);
    }
  }
}
