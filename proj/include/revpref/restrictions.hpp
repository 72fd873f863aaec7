#pragma once

#include <string>

#include "revpref/core.hpp"

namespace revpref {

enum class RestrictionKind { fosd, homothetic, quasilinear, gapp };

std::string to_string(RestrictionKind kind);

struct RestrictionReport {
  RestrictionKind kind = RestrictionKind::fosd;
  double efficiency = 1.0;
  bool passes_at_1 = true;
};

/// CCEI of the dataset augmented with the coordinate-swapped mirror of every
/// observation. For two equiprobable contingent assets this captures
/// symmetric monotone rationalizability, i.e. respect for first-order
/// stochastic dominance. Requires K = 2.
double fosd_ccei(const ChoiceDataset& ds);

/// Homothetic consistency requires every cycle's product of cross-cost
/// ratios (p^i.x^j / p^i.x^i) to be at least 1. The efficiency value is
/// exp(mu*) with mu* the minimum mean cycle weight of log ratios, clamped to
/// [0, 1]; computed exactly with Karp's recurrence.
double harp_efficiency(const ChoiceDataset& ds);

/// Quasilinear consistency (cyclical monotonicity) requires non-negative
/// cycle sums of p^i.(x^{next} - x^i). The efficiency value is the minimum
/// over cycles of (sum of cross costs) / (sum of own costs), clamped to
/// [0, 1]; located by parametric search with negative-cycle detection.
double quasilinear_efficiency(const ChoiceDataset& ds);

/// Price preference: p^i is revealed weakly preferred to p^j when buying
/// x^j costs no more than e times what was paid for it, strictly when less.
/// The axiom holds when no preference cycle contains a strict edge.
bool gapp_passes(const ChoiceDataset& ds, double e, double tol = kDefaultTol);

/// Largest e at which gapp_passes holds.
double gapp_efficiency(const ChoiceDataset& ds, double tol = kDefaultTol);

RestrictionReport check_gapp(const ChoiceDataset& ds);

/// Bundles any of the four restrictions into a report row.
RestrictionReport restriction_report(const ChoiceDataset& ds, RestrictionKind kind);

}  // namespace revpref
