#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "revpref/garp.hpp"
#include "revpref/indices.hpp"
#include "revpref/rng.hpp"

using namespace revpref;

TEST_CASE("index fixtures on the worked micro-dataset") {
  const auto ds = oracles::dagger();
  CHECK(ccei(ds) == doctest::Approx(0.5).epsilon(1e-12));
  const auto h = hmi(ds);
  CHECK(h.kept == 1);
  CHECK(h.value == doctest::Approx(0.5));
  CHECK(mpi(ds) == doctest::Approx(0.5));
  const auto m = mci(ds);
  CHECK(m.exact);
  CHECK(m.value == doctest::Approx(0.25));

  const auto report = index_report(ds);
  CHECK(report.ccei == doctest::Approx(0.5));
  CHECK(report.hmi == doctest::Approx(0.5));
  CHECK(report.mpi == doctest::Approx(0.5));
  CHECK(report.mci == doctest::Approx(0.25));
  CHECK(report.two_cycles == 1);
  CHECK(report.violating_pairs == 2);
}

TEST_CASE("perfectly consistent data scores perfectly") {
  const auto clean = make_dataset({{{1, 1}, {1, 1}}, {{5, 5}, {2, 2}}, {{9, 9}, {3, 3}}});
  CHECK(ccei(clean) == 1.0);
  CHECK(hmi(clean).kept == 3);
  CHECK(mpi(clean) == 0.0);
  CHECK(mci(clean).value == 0.0);

  CHECK(ccei(make_dataset({{{3, 4}, {1, 2}}})) == 1.0);

  // 22 consistent observations exercise the subset search at scale
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rows;
  for (int t = 0; t < 22; ++t) {
    const double level = 1.0 + 0.5 * t;
    rows.push_back({{1.0, 1.0}, {level, level}});
  }
  const auto big = make_dataset(rows);
  const auto h = hmi(big);
  CHECK(h.kept == 22);
  CHECK(h.value == doctest::Approx(1.0));
}

TEST_CASE("indices match their brute-force oracles on random instances") {
  Rng rng(17, "indices-oracle");
  for (int rep = 0; rep < 200; ++rep) {
    const auto ds = oracles::random_small(rng);
    CAPTURE(rep);
    CHECK(std::fabs(ccei(ds) - oracles::ccei_grid(ds)) <= 1e-4);
    CHECK(hmi(ds).kept == oracles::hmi_subsets(ds));
    CHECK(mpi(ds) == doctest::Approx(oracles::mpi_pairs(ds)).epsilon(1e-12));
    const auto m = mci(ds);
    CHECK(m.exact);
    CHECK(std::fabs(m.value - oracles::mci_orderings(ds)) <= 1e-9);
  }
}

TEST_CASE("perfect-consistency equivalence across all four indices") {
  // tie-free instances: the four-way equivalence is a generic property
  Rng rng(18, "indices-equivalence");
  for (int rep = 0; rep < 300; ++rep) {
    const auto ds = oracles::random_smooth(rng);
    const auto report = index_report(ds);
    const bool passes = oracles::garp_pass(ds, 1.0);
    CHECK((report.ccei == 1.0) == passes);
    CHECK((report.hmi == 1.0) == passes);
    CHECK((report.mpi == 0.0) == passes);
    CHECK((report.mci == 0.0) == passes);
  }
}

TEST_CASE("affordability ties can make violations free to remove") {
  // x^1 costs exactly its own budget at p^1 while x^2 is strictly cheaper
  // at p^2: the axiom fails, yet the only cycle breaks through the
  // zero-cost equality edge, so the minimum removal cost is zero. CCEI,
  // HMI, and MPI still flag the violation.
  const auto knife = make_dataset({{{1, 1}, {2, 2}}, {{1, 4}, {1, 3}}});
  CHECK_FALSE(check_garp(knife, 1.0).passes);
  CHECK(mci(knife).value == 0.0);
  CHECK(ccei(knife) < 1.0);
  CHECK(ccei(knife) > 0.999999);  // the violation lives only at the boundary
  CHECK(hmi(knife).kept == 1);
  CHECK(mpi(knife) > 0.0);
}

TEST_CASE("sub-datasets are no less consistent") {
  Rng rng(19, "indices-subset");
  for (int rep = 0; rep < 60; ++rep) {
    const auto ds = oracles::random_small(rng);
    if (ds.rounds() < 2) continue;
    const double full = ccei(ds);
    const unsigned mask =
        1u + static_cast<unsigned>(rng.next_below((1u << ds.rounds()) - 1));
    const auto sub = oracles::subset_of(ds, mask);
    CHECK(ccei(sub) >= full - 1e-12);
  }
}

TEST_CASE("per-observation price rescaling leaves CCEI and HMI unchanged") {
  Rng rng(20, "indices-rescale");
  for (int rep = 0; rep < 60; ++rep) {
    const auto ds = oracles::random_small(rng);
    ChoiceDataset scaled = ds;
    double lambda = 0.25;
    for (auto& obs : scaled.observations) {
      for (double& p : obs.prices) p *= lambda;
      lambda *= 2.0;
    }
    // equality up to the absolute comparison tolerance, which does not
    // rescale with the budgets
    CHECK(std::fabs(ccei(scaled) - ccei(ds)) <= 2e-9);
    CHECK(hmi(scaled).kept == hmi(ds).kept);
  }
}

TEST_CASE("node caps are honored") {
  // heavily conflicted instance so both searches must branch
  const auto ds = make_dataset({{{1, 4}, {0, 0.5}},
                                {{4, 1}, {0.5, 0}},
                                {{1, 1}, {0.3, 0.3}},
                                {{2, 3}, {0.1, 0.1}},
                                {{3, 2}, {0.12, 0.12}}});
  CHECK_THROWS_AS(hmi(ds, 2), SearchBudgetExceeded);
  const auto capped = mci(ds, 2);
  CHECK_FALSE(capped.exact);
  // the capped value is still a feasible (upper-bound) removal cost
  CHECK(capped.value >= oracles::mci_orderings(ds) - 1e-12);
}

TEST_CASE("csv row layout") {
  IndexReport r;
  r.label = "c1";
  r.ccei = 0.5;
  r.hmi = 0.5;
  r.mpi = 0.5;
  r.mci = 0.25;
  r.hmi_kept = 1;
  r.mci_exact = true;
  r.two_cycles = 1;
  CHECK(index_csv_header() == "label,ccei,hmi,mpi,mci,hmi_kept,mci_exact,two_cycles");
  CHECK(index_csv_row(r) == "c1,0.5,0.5,0.5,0.25,1,true,1");
}
