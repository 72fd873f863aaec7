#pragma once

#include <cstdint>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

/// A sequence of budgets (price vectors) with a common expenditure
/// normalization, as faced by every simulated chooser.
struct BudgetDesign {
  std::vector<std::vector<double>> prices;
  double expenditure = 100.0;
};

/// Experiment-style default design: `rounds` two-good budgets whose log
/// price ratio is uniform on [-ln 3, ln 3], normalized so both prices
/// multiply to 1 and expenditure is fixed.
BudgetDesign experiment_budgets(int rounds, std::uint64_t seed,
                                double expenditure = 100.0);

struct SimulationSummary {
  int n_sims = 0;
  std::vector<double> scores;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

SimulationSummary summarize_scores(std::vector<double> scores);

/// Uniform-random choosers over n_options equally spaced allocations on each
/// budget; one CCEI per simulated chooser. Deterministic per seed.
SimulationSummary bronars_discrete(const BudgetDesign& design, int n_options,
                                   int n_sims, std::uint64_t seed);

/// Uniform-random budget-share choosers on the dataset's own budgets,
/// keeping each observation's prices and expenditure. Deterministic per seed.
SimulationSummary bronars_shares(const ChoiceDataset& ds, int n_sims,
                                 std::uint64_t seed);

/// Observed score minus the random-chooser benchmark mean.
double selten_score(double observed_ccei, const SimulationSummary& simulated);

/// Residuals from an OLS regression with intercept. The default regresses
/// simulated on observed; pass reverse = true for the other direction.
std::vector<double> power_adjusted_ccei(const std::vector<double>& observed,
                                        const std::vector<double>& simulated_means,
                                        bool reverse = false);

struct PermutationResult {
  double p_value = 1.0;
  bool aborted = false;
  int draws = 0;
};

/// Share-shuffling test of random choice: permutes the expenditure-share
/// vectors across rounds (budgets fixed), rebuilds bundles on each budget
/// line, and reports the fraction of permuted CCEIs at or above the observed
/// CCEI. If that fraction exceeds abort_threshold at the abort_check_at-th
/// draw, stops there and reports the running value.
PermutationResult permutation_test(const ChoiceDataset& ds, int n_perm = 10000,
                                   double abort_threshold = 0.2,
                                   int abort_check_at = 1000,
                                   std::uint64_t seed = 0);

/// Classification rule: an approximate utility maximizer has p below alpha.
inline bool classified_maximizer(const PermutationResult& r, double alpha = 0.05) {
  return r.p_value < alpha;
}

}  // namespace revpref
