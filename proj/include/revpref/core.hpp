#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace revpref {

/// Absolute tolerance used in all affordability comparisons. Prices derived
/// from measured quantities carry rounding noise, so "strictly cheaper" means
/// cheaper by more than this margin.
inline constexpr double kDefaultTol = 1e-9;

/// One budget choice: the price vector faced and the bundle bought.
struct Observation {
  std::string obs_id;
  std::vector<double> prices;  // length K, all > 0
  std::vector<double> bundle;  // length K, all >= 0, p.x > 0
};

/// p . x of one observation.
double expenditure(const Observation& obs);

/// An ordered sequence of observations with a uniform number of goods.
struct ChoiceDataset {
  std::string label;
  std::vector<Observation> observations;

  std::size_t rounds() const { return observations.size(); }
  std::size_t goods() const {
    return observations.empty() ? 0 : observations.front().prices.size();
  }
};

/// Builds a validated dataset from (prices, bundle) rows, preserving order.
/// Throws std::invalid_argument naming the offending row on dimension
/// mismatch, non-positive price, negative quantity, or zero expenditure.
ChoiceDataset make_dataset(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& rows,
    std::string label = {});

/// Same validation as make_dataset for datasets assembled elsewhere.
void validate_dataset(const ChoiceDataset& ds);

/// cross[i*T+j] = p^i . x^j; the diagonal holds expenditures.
std::vector<double> cross_cost_matrix(const ChoiceDataset& ds);

/// Direct and transitive revealed-preference relations at one efficiency
/// level e: weak(i,j) iff p^i.x^j <= e * p^i.x^i, strict with < instead
/// (both with the configured tolerance). closure stays empty until
/// transitive_closure is applied.
struct RelationMatrix {
  std::size_t n = 0;
  double efficiency = 1.0;
  std::vector<char> weak;
  std::vector<char> strict;
  std::vector<char> closure;

  bool weak_at(std::size_t i, std::size_t j) const { return weak[i * n + j] != 0; }
  bool strict_at(std::size_t i, std::size_t j) const { return strict[i * n + j] != 0; }
  bool closure_at(std::size_t i, std::size_t j) const { return closure[i * n + j] != 0; }
  bool has_closure() const { return !closure.empty(); }
};

/// Throws std::invalid_argument if e is outside [0, 1].
RelationMatrix direct_relations(const ChoiceDataset& ds, double e,
                                double tol = kDefaultTol);

/// Fills in the reflexive-transitive closure of weak by iterative path
/// composition over all intermediate indices. Idempotent.
RelationMatrix transitive_closure(RelationMatrix rel);

}  // namespace revpref
