#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "revpref/core.hpp"
#include "revpref/etl.hpp"

namespace revpref {

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
  int n = 0;
};

/// Spearman rank correlation: Pearson on average ranks, two-sided p from the
/// t approximation with n-2 degrees of freedom. Throws on n < 3 or zero rank
/// variance.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

struct CceiDiffResult {
  double diff = 0.0;
  double benchmark_mean = 0.0;
};

/// min{CCEI(s1), CCEI(s2)} - CCEI(combined), which is non-negative because
/// the combined dataset nests both parts. The benchmark re-partitions the
/// combined observations into the same part sizes n_splits times at random
/// and averages the same statistic. Deterministic per seed.
CceiDiffResult ccei_diff(const ChoiceDataset& s1, const ChoiceDataset& s2,
                         int n_splits = 100, std::uint64_t seed = 0);

/// Spearman correlation between ln(x1/x2) and ln(p1/p2) over rounds with
/// both quantities positive; at least 3 such rounds required. K = 2.
CorrelationResult downward_sloping_score(const ChoiceDataset& ds);

struct MiddleChooserResult {
  bool is_middle = false;
  int qualifying_rounds = 0;
};

/// Classifies a chooser as picking near-middle allocations whenever prices
/// are close: qualifying rounds have p1/p2 inside ratio_range, and the
/// chooser passes when the budget share of good 1 lies inside band in all of
/// them (majority of them with require_all = false). No qualifying rounds
/// means not a middle chooser.
MiddleChooserResult middle_chooser(const ChoiceDataset& ds, double band_lo = 0.4,
                                   double band_hi = 0.6, double ratio_lo = 0.9,
                                   double ratio_hi = 1.1, bool require_all = true);

enum class VolatilityGrouping { hours_of_day, days_of_week, ten_day_periods };
enum class VolatilityBasis { amount, count };

VolatilityGrouping parse_grouping(const std::string& name);
VolatilityBasis parse_basis(const std::string& name);
std::string to_string(VolatilityGrouping grouping);
std::string to_string(VolatilityBasis basis);

struct VolatilityResult {
  VolatilityGrouping grouping = VolatilityGrouping::hours_of_day;
  VolatilityBasis basis = VolatilityBasis::amount;
  double value = 0.0;
};

/// Month-to-month instability of a consumer's shopping pattern in one year:
/// per month, each group's share of transaction amount (or count); per
/// group, the standard deviation of that share over the fixed 12-month
/// frame (population form; empty months contribute zero shares); the result
/// averages those deviations across groups. Requires transactions in at
/// least 2 months of the year.
VolatilityResult volatility(const std::vector<TransactionRecord>& records,
                            const std::string& consumer, int year,
                            VolatilityGrouping grouping, VolatilityBasis basis);

struct DiscountMetrics {
  double prop_discounted = 0.0;
  double aggregate_rate = 0.0;
  double mean_txn_rate = 0.0;
};

/// Frequency and magnitude of discount usage for one consumer-year. Records
/// without a shelf price count as undiscounted at shelf = final.
DiscountMetrics discount_metrics(const std::vector<TransactionRecord>& records,
                                 const std::string& consumer, int year);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
};

/// Paired t-test with n-1 degrees of freedom, two-sided. Throws on length
/// mismatch, n < 2, or zero variance of the differences.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace revpref
