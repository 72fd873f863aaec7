#include "revpref/analytics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "revpref/indices.hpp"
#include "revpref/rng.hpp"
#include "revpref/stats.hpp"

namespace revpref {

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("spearman: need at least 3 pairs");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
    sxy += (rx[i] - mx) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw std::invalid_argument("spearman: zero rank variance");
  }
  CorrelationResult result;
  result.n = static_cast<int>(n);
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  if (1.0 - result.r * result.r <= 1e-15) {
    result.p_value = 0.0;
  } else {
    const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
    result.p_value = student_t_two_sided_p(t, df);
  }
  return result;
}

namespace {

ChoiceDataset concat(const ChoiceDataset& a, const ChoiceDataset& b) {
  ChoiceDataset combined;
  combined.label = a.label + "+" + b.label;
  combined.observations = a.observations;
  combined.observations.insert(combined.observations.end(), b.observations.begin(),
                               b.observations.end());
  return combined;
}

ChoiceDataset select(const ChoiceDataset& src, const std::vector<std::size_t>& idx) {
  ChoiceDataset out;
  out.label = src.label;
  for (std::size_t i : idx) out.observations.push_back(src.observations[i]);
  return out;
}

}  // namespace

CceiDiffResult ccei_diff(const ChoiceDataset& s1, const ChoiceDataset& s2,
                         int n_splits, std::uint64_t seed) {
  if (s1.goods() != s2.goods()) {
    throw std::invalid_argument("ccei_diff: datasets must share the number of goods");
  }
  if (n_splits < 1) throw std::invalid_argument("ccei_diff: n_splits must be >= 1");
  const ChoiceDataset combined = concat(s1, s2);
  const double combined_score = ccei(combined);

  CceiDiffResult result;
  result.diff = std::min(ccei(s1), ccei(s2)) - combined_score;

  const std::size_t n1 = s1.rounds();
  const std::size_t n = combined.rounds();
  Rng rng(seed, s1.label + "|" + s2.label + "|ccei-diff");
  std::vector<std::size_t> order(n);
  double total = 0.0;
  for (int rep = 0; rep < n_splits; ++rep) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    std::vector<std::size_t> left(order.begin(), order.begin() + n1);
    std::vector<std::size_t> right(order.begin() + n1, order.end());
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    const double split_score =
        std::min(ccei(select(combined, left)), ccei(select(combined, right)));
    total += split_score - combined_score;
  }
  result.benchmark_mean = total / n_splits;
  return result;
}

CorrelationResult downward_sloping_score(const ChoiceDataset& ds) {
  if (ds.goods() != 2) {
    throw std::invalid_argument("downward_sloping_score requires exactly two goods");
  }
  std::vector<double> log_q, log_p;
  for (const auto& obs : ds.observations) {
    if (obs.bundle[0] <= 0.0 || obs.bundle[1] <= 0.0) continue;
    log_q.push_back(std::log(obs.bundle[0] / obs.bundle[1]));
    log_p.push_back(std::log(obs.prices[0] / obs.prices[1]));
  }
  if (log_q.size() < 3) {
    throw std::invalid_argument("downward_sloping_score: fewer than 3 interior rounds");
  }
  return spearman(log_q, log_p);
}

MiddleChooserResult middle_chooser(const ChoiceDataset& ds, double band_lo,
                                   double band_hi, double ratio_lo, double ratio_hi,
                                   bool require_all) {
  if (ds.goods() != 2) {
    throw std::invalid_argument("middle_chooser requires exactly two goods");
  }
  MiddleChooserResult result;
  int in_band = 0;
  for (const auto& obs : ds.observations) {
    const double ratio = obs.prices[0] / obs.prices[1];
    if (ratio < ratio_lo || ratio > ratio_hi) continue;
    ++result.qualifying_rounds;
    const double share = obs.prices[0] * obs.bundle[0] / expenditure(obs);
    if (share >= band_lo - 1e-9 && share <= band_hi + 1e-9) ++in_band;
  }
  if (result.qualifying_rounds == 0) {
    result.is_middle = false;  // no evidence, no classification
  } else if (require_all) {
    result.is_middle = in_band == result.qualifying_rounds;
  } else {
    result.is_middle = 2 * in_band > result.qualifying_rounds;
  }
  return result;
}

VolatilityGrouping parse_grouping(const std::string& name) {
  if (name == "hours_of_day") return VolatilityGrouping::hours_of_day;
  if (name == "days_of_week") return VolatilityGrouping::days_of_week;
  if (name == "ten_day_periods") return VolatilityGrouping::ten_day_periods;
  throw std::invalid_argument("unknown grouping '" + name + "'");
}

VolatilityBasis parse_basis(const std::string& name) {
  if (name == "amount") return VolatilityBasis::amount;
  if (name == "count") return VolatilityBasis::count;
  throw std::invalid_argument("unknown basis '" + name + "'");
}

std::string to_string(VolatilityGrouping grouping) {
  switch (grouping) {
    case VolatilityGrouping::hours_of_day: return "hours_of_day";
    case VolatilityGrouping::days_of_week: return "days_of_week";
    case VolatilityGrouping::ten_day_periods: return "ten_day_periods";
  }
  return "?";
}

std::string to_string(VolatilityBasis basis) {
  return basis == VolatilityBasis::amount ? "amount" : "count";
}

namespace {

int group_of(const TransactionRecord& rec, VolatilityGrouping grouping) {
  switch (grouping) {
    case VolatilityGrouping::hours_of_day:
      return rec.hour;
    case VolatilityGrouping::days_of_week: {
      const std::chrono::year_month_day ymd{std::chrono::year{rec.year},
                                            std::chrono::month{unsigned(rec.month)},
                                            std::chrono::day{unsigned(rec.day)}};
      return static_cast<int>(std::chrono::weekday{std::chrono::sys_days{ymd}}.iso_encoding()) - 1;
    }
    case VolatilityGrouping::ten_day_periods:
      return rec.day <= 10 ? 0 : rec.day <= 20 ? 1 : 2;
  }
  return 0;
}

int group_count(VolatilityGrouping grouping) {
  switch (grouping) {
    case VolatilityGrouping::hours_of_day: return 24;
    case VolatilityGrouping::days_of_week: return 7;
    case VolatilityGrouping::ten_day_periods: return 3;
  }
  return 0;
}

double population_sd(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

VolatilityResult volatility(const std::vector<TransactionRecord>& records,
                            const std::string& consumer, int year,
                            VolatilityGrouping grouping, VolatilityBasis basis) {
  const int groups = group_count(grouping);
  // v[month 0..11][group]
  std::vector<std::vector<double>> v(12, std::vector<double>(groups, 0.0));
  std::set<int> active_months;
  for (const auto& rec : records) {
    if (rec.membership_id != consumer || rec.year != year) continue;
    active_months.insert(rec.month);
    const double weight = basis == VolatilityBasis::amount ? rec.expenditure : 1.0;
    v[rec.month - 1][group_of(rec, grouping)] += weight;
  }
  if (active_months.size() < 2) {
    throw std::invalid_argument("volatility: fewer than 2 active months for '" +
                                consumer + "' in " + std::to_string(year));
  }

  std::vector<std::vector<double>> shares(groups, std::vector<double>(12, 0.0));
  for (int t = 0; t < 12; ++t) {
    const double total = std::accumulate(v[t].begin(), v[t].end(), 0.0);
    if (total <= 0.0) continue;  // empty month keeps zero shares
    for (int g = 0; g < groups; ++g) shares[g][t] = v[t][g] / total;
  }

  double sum_sd = 0.0;
  for (int g = 0; g < groups; ++g) sum_sd += population_sd(shares[g]);

  VolatilityResult result;
  result.grouping = grouping;
  result.basis = basis;
  result.value = sum_sd / groups;
  return result;
}

DiscountMetrics discount_metrics(const std::vector<TransactionRecord>& records,
                                 const std::string& consumer, int year) {
  int total = 0;
  int discounted = 0;
  double shelf_sum = 0.0;
  double final_sum = 0.0;
  double rate_sum = 0.0;
  for (const auto& rec : records) {
    if (rec.membership_id != consumer || rec.year != year) continue;
    ++total;
    if (rec.discounted()) ++discounted;
    const double shelf = rec.shelf_expenditure.value_or(rec.expenditure);
    shelf_sum += shelf;
    final_sum += rec.expenditure;
    if (shelf > 0.0) rate_sum += (shelf - rec.expenditure) / shelf;
  }
  if (total == 0) {
    throw std::invalid_argument("discount_metrics: no transactions for '" + consumer +
                                "' in " + std::to_string(year));
  }
  if (shelf_sum <= 0.0) {
    throw std::invalid_argument("discount_metrics: zero shelf total");
  }
  DiscountMetrics metrics;
  metrics.prop_discounted = static_cast<double>(discounted) / total;
  metrics.aggregate_rate = (shelf_sum - final_sum) / shelf_sum;
  metrics.mean_txn_rate = rate_sum / total;
  return metrics;
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_ttest: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired_ttest: need at least 2 pairs");
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double sd = sample_sd(diff);
  if (sd <= 0.0) {
    throw std::invalid_argument("paired_ttest: zero variance of differences");
  }
  TTestResult result;
  result.t = mean(diff) / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value = student_t_two_sided_p(result.t, static_cast<double>(n - 1));
  return result;
}

}  // namespace revpref
