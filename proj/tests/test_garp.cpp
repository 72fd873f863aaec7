#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "oracles.hpp"
#include "revpref/garp.hpp"
#include "revpref/rng.hpp"

using namespace revpref;

namespace {

// three observations that violate pairwise in every combination
ChoiceDataset triple_violator() {
  return make_dataset({{{1, 4}, {0, 0.5}}, {{4, 1}, {0.5, 0}}, {{1, 1}, {0.3, 0.3}}});
}

}  // namespace

TEST_CASE("check_garp on the worked datasets") {
  SUBCASE("mutual violation pair") {
    const auto report = check_garp(oracles::dagger(), 1.0);
    CHECK_FALSE(report.passes);
    REQUIRE(report.violating_pairs.size() == 2);
    CHECK(report.violating_pairs[0] == std::pair<int, int>{0, 1});
    CHECK(report.violating_pairs[1] == std::pair<int, int>{1, 0});
    REQUIRE(report.two_cycles.size() == 1);
    CHECK(report.two_cycles[0] == std::pair<int, int>{0, 1});
  }
  SUBCASE("single observation always passes") {
    const auto report = check_garp(make_dataset({{{1, 2}, {3, 4}}}), 1.0);
    CHECK(report.passes);
    CHECK(report.violating_pairs.empty());
  }
  SUBCASE("price-preference counterexample still satisfies the plain axiom") {
    CHECK(check_garp(oracles::gapp_footnote(), 1.0).passes);
  }
  SUBCASE("passes below the violation threshold") {
    CHECK(check_garp(oracles::dagger(), 0.5).passes);
    CHECK_FALSE(check_garp(oracles::dagger(), 0.75).passes);
  }
}

TEST_CASE("two-cycle enumeration") {
  CHECK(violation_two_cycles(oracles::dagger()) ==
        std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(violation_two_cycles(oracles::gapp_footnote()).empty());

  const auto triple = triple_violator();
  const auto cycles = violation_two_cycles(triple);
  CHECK(cycles == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  // enumeration oracle agreement on random instances
  Rng rng(91, "garp-two-cycles");
  for (int rep = 0; rep < 100; ++rep) {
    const auto ds = oracles::random_small(rng);
    int direct = 0;
    for (std::size_t i = 0; i < ds.rounds(); ++i) {
      for (std::size_t j = i + 1; j < ds.rounds(); ++j) {
        const auto pair = oracles::subset_of(ds, (1u << i) | (1u << j));
        if (!oracles::garp_pass(pair, 1.0)) ++direct;
      }
    }
    CHECK(static_cast<int>(violation_two_cycles(ds).size()) == direct);
  }
}

TEST_CASE("pairwise violation proportion") {
  const std::vector<int> g0{0}, g1{1};
  CHECK(pairwise_violation_proportion(oracles::dagger(), g0, g1) == doctest::Approx(1.0));

  const auto clean = make_dataset({{{1, 1}, {1, 1}}, {{5, 5}, {2, 2}}, {{9, 9}, {3, 3}}});
  const std::vector<int> a{0, 1}, b{2};
  CHECK(pairwise_violation_proportion(clean, a, b) == doctest::Approx(0.0));

  // four observations where exactly {0, 1} violates
  auto rows = std::vector<std::pair<std::vector<double>, std::vector<double>>>{
      {{1, 2}, {0, 1}},
      {{2, 1}, {1, 0}},
      {{1, 1}, {10, 10}},
      {{1, 1.01}, {10, 10}},
  };
  const auto four = make_dataset(rows);
  REQUIRE(violation_two_cycles(four) == std::vector<std::pair<int, int>>{{0, 1}});
  const std::vector<int> ga{0, 2}, gb{1, 3};
  CHECK(pairwise_violation_proportion(four, ga, gb) == doctest::Approx(0.25));

  SUBCASE("within-group pairs count once") {
    const std::vector<int> all{0, 1, 2, 3};
    // 6 unordered pairs, one violating
    CHECK(pairwise_violation_proportion(four, all, all) == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("empty group is an error") {
    CHECK_THROWS_AS(pairwise_violation_proportion(four, {}, gb), std::invalid_argument);
    CHECK_THROWS_AS(pairwise_violation_proportion(four, ga, {}), std::invalid_argument);
  }
}

TEST_CASE("two-observation violation equals the direct affordability test") {
  Rng rng(4242, "garp-warp");
  for (int rep = 0; rep < 300; ++rep) {
    auto draw = [&] { return 1.0 + static_cast<double>(rng.next_below(4)); };
    const auto ds = make_dataset({{{draw(), draw()}, {draw(), draw()}},
                                  {{draw(), draw()}, {draw(), draw()}}});
    const auto cross = oracles::cross_costs(ds);
    const bool w01 = cross[1] <= cross[0] + oracles::kTol;
    const bool w10 = cross[2] <= cross[3] + oracles::kTol;
    const bool s01 = cross[1] < cross[0] - oracles::kTol;
    const bool s10 = cross[2] < cross[3] - oracles::kTol;
    const bool warp_violation = w01 && w10 && (s01 || s10);
    CHECK(check_garp(ds, 1.0).passes == !warp_violation);
  }
}

TEST_CASE("failures persist as the efficiency level rises") {
  Rng rng(808, "garp-monotone");
  for (int rep = 0; rep < 100; ++rep) {
    const auto ds = oracles::random_small(rng);
    const double e = rng.next_double();
    if (!check_garp(ds, e).passes) {
      const double higher = e + (1.0 - e) * rng.next_double();
      CHECK_FALSE(check_garp(ds, higher).passes);
    }
  }
}

TEST_CASE("report serializes with 1-based indices") {
  const auto json_text = to_json_string(check_garp(oracles::dagger(), 1.0));
  CHECK(json_text.find("\"passes\":false") != std::string::npos);
  CHECK(json_text.find("[[1,2],[2,1]]") != std::string::npos);
  CHECK(json_text.find("\"two_cycles\":[[1,2]]") != std::string::npos);
}
