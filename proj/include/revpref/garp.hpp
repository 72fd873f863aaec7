#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

/// GARP verdict for one dataset at one efficiency level. A violating pair
/// (i, j) means x^i is revealed preferred to x^j while x^j is directly
/// strictly revealed preferred to x^i. Indices are 0-based here and 1-based
/// in serialized reports.
struct GarpReport {
  bool passes = true;
  double efficiency = 1.0;
  std::vector<std::pair<int, int>> violating_pairs;
  std::vector<std::pair<int, int>> two_cycles;  // unordered, stored i < j
};

GarpReport check_garp(const ChoiceDataset& ds, double e, double tol = kDefaultTol);

/// Violation test on relations whose closure is already computed.
bool garp_passes(const RelationMatrix& closed);

/// All unordered pairs {i, j} that violate GARP between themselves alone at
/// e = 1, i.e. mutually affordable with at least one strict direction.
std::vector<std::pair<int, int>> violation_two_cycles(const ChoiceDataset& ds,
                                                      double tol = kDefaultTol);

/// Fraction of cross pairs (a in A, b in B, a != b) whose two-observation
/// sub-dataset violates GARP. With A == B each pair counts once. Groups hold
/// 0-based observation indices; throws std::invalid_argument on empty or
/// out-of-range groups.
double pairwise_violation_proportion(const ChoiceDataset& ds,
                                     std::span<const int> group_a,
                                     std::span<const int> group_b,
                                     double tol = kDefaultTol);

/// JSON form {passes, efficiency, violating_pairs, two_cycles}, 1-based pairs.
std::string to_json_string(const GarpReport& report);

}  // namespace revpref
