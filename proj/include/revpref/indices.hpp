#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "revpref/core.hpp"

namespace revpref {

/// Node budget for the exact subset/edge searches. Never binds at the scale
/// these indices are used (T <= 24) but protects batch runs on pathological
/// input.
inline constexpr std::uint64_t kDefaultNodeCap = 10'000'000;

/// Raised when an exact search exceeds its node cap and the operation has no
/// bounded-result fallback.
class SearchBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest efficiency level at which the dataset passes GARP. Exact: the
/// pass/fail status can only change at cross-cost ratios p^i.x^j / p^i.x^i,
/// so the supremum is located by binary search over that candidate set.
double ccei(const ChoiceDataset& ds, double tol = kDefaultTol);

struct HmiResult {
  double value = 1.0;  // kept / T
  int kept = 0;
};

/// Size of the largest subset of observations whose induced sub-dataset
/// passes GARP at e = 1. Exact branch-and-bound over violating-cycle
/// vertices; throws SearchBudgetExceeded if node_cap is hit.
HmiResult hmi(const ChoiceDataset& ds, std::uint64_t node_cap = kDefaultNodeCap);

/// Mean money-pump cost over violating 2-cycles: for each {i, j} the pump
/// profit [p^i.(x^i-x^j) + p^j.(x^j-x^i)] divided by the pair's total
/// expenditure, averaged; 0 when no 2-cycle violates.
double mpi(const ChoiceDataset& ds);

struct MciResult {
  double value = 0.0;
  bool exact = true;
};

/// Minimum total cost of direct revealed-preference edges whose removal
/// leaves the relation graph acyclic, normalized by total expenditure. Edge
/// cost is p^i.(x^i - x^j) clamped below at 0. Exact branch-and-bound over
/// the cyclic core; if node_cap is hit the best bound found is returned with
/// exact = false.
MciResult mci(const ChoiceDataset& ds, std::uint64_t node_cap = kDefaultNodeCap);

struct IndexReport {
  std::string label;
  double ccei = 1.0;
  double hmi = 1.0;
  double mpi = 0.0;
  double mci = 0.0;
  int hmi_kept = 0;
  bool mci_exact = true;
  int violating_pairs = 0;
  int two_cycles = 0;
};

IndexReport index_report(const ChoiceDataset& ds,
                         std::uint64_t node_cap = kDefaultNodeCap);

std::string index_csv_header();
std::string index_csv_row(const IndexReport& report);

}  // namespace revpref
