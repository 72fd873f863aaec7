#include "revpref/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "revpref/indices.hpp"
#include "revpref/rng.hpp"
#include "revpref/stats.hpp"

namespace revpref {

BudgetDesign experiment_budgets(int rounds, std::uint64_t seed, double expenditure) {
  if (rounds < 1) throw std::invalid_argument("experiment_budgets: rounds must be >= 1");
  BudgetDesign design;
  design.expenditure = expenditure;
  Rng rng(seed, "budget-design");
  const double span = std::log(3.0);
  for (int t = 0; t < rounds; ++t) {
    const double log_ratio = (2.0 * rng.next_double() - 1.0) * span;
    design.prices.push_back({std::exp(0.5 * log_ratio), std::exp(-0.5 * log_ratio)});
  }
  return design;
}

SimulationSummary summarize_scores(std::vector<double> scores) {
  SimulationSummary s;
  s.n_sims = static_cast<int>(scores.size());
  if (scores.empty()) return s;
  s.mean = mean(scores);
  s.sd = sample_sd(scores);
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t n = sorted.size();
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.scores = std::move(scores);
  return s;
}

SimulationSummary bronars_discrete(const BudgetDesign& design, int n_options,
                                   int n_sims, std::uint64_t seed) {
  if (n_options < 2) throw std::invalid_argument("bronars_discrete: n_options must be >= 2");
  if (n_sims < 1) throw std::invalid_argument("bronars_discrete: n_sims must be >= 1");
  for (const auto& p : design.prices) {
    if (p.size() != 2) throw std::invalid_argument("bronars_discrete: two-good budgets required");
  }
  const std::size_t rounds = design.prices.size();
  Rng rng(seed, "bronars-discrete");
  std::vector<double> scores;
  scores.reserve(n_sims);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rows(rounds);
  for (int s = 0; s < n_sims; ++s) {
    for (std::size_t t = 0; t < rounds; ++t) {
      const auto& p = design.prices[t];
      const double f = static_cast<double>(rng.next_below(n_options)) /
                       static_cast<double>(n_options - 1);
      rows[t].first = p;
      rows[t].second = {f * design.expenditure / p[0],
                        (1.0 - f) * design.expenditure / p[1]};
    }
    scores.push_back(ccei(make_dataset(rows)));
  }
  return summarize_scores(std::move(scores));
}

namespace {

// Uniform random point on the K-simplex (expenditure shares).
std::vector<double> random_shares(std::size_t k, Rng& rng) {
  std::vector<double> shares(k);
  double total = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    shares[g] = -std::log(rng.next_open());
    total += shares[g];
  }
  for (double& s : shares) s /= total;
  return shares;
}

}  // namespace

SimulationSummary bronars_shares(const ChoiceDataset& ds, int n_sims,
                                 std::uint64_t seed) {
  if (n_sims < 1) throw std::invalid_argument("bronars_shares: n_sims must be >= 1");
  const std::size_t rounds = ds.rounds();
  const std::size_t goods = ds.goods();
  Rng rng(seed, ds.label.empty() ? "bronars-shares" : ds.label);
  std::vector<double> scores;
  scores.reserve(n_sims);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rows(rounds);
  for (int s = 0; s < n_sims; ++s) {
    for (std::size_t t = 0; t < rounds; ++t) {
      const auto& obs = ds.observations[t];
      const double budget = expenditure(obs);
      const std::vector<double> shares = random_shares(goods, rng);
      rows[t].first = obs.prices;
      rows[t].second.resize(goods);
      for (std::size_t g = 0; g < goods; ++g) {
        rows[t].second[g] = shares[g] * budget / obs.prices[g];
      }
    }
    scores.push_back(ccei(make_dataset(rows)));
  }
  return summarize_scores(std::move(scores));
}

double selten_score(double observed_ccei, const SimulationSummary& simulated) {
  return observed_ccei - simulated.mean;
}

std::vector<double> power_adjusted_ccei(const std::vector<double>& observed,
                                        const std::vector<double>& simulated_means,
                                        bool reverse) {
  if (observed.size() != simulated_means.size()) {
    throw std::invalid_argument("power_adjusted_ccei: length mismatch");
  }
  if (observed.size() < 3) {
    throw std::invalid_argument("power_adjusted_ccei: need at least 3 pairs");
  }
  if (reverse) return ols_residuals(simulated_means, observed);
  return ols_residuals(observed, simulated_means);
}

PermutationResult permutation_test(const ChoiceDataset& ds, int n_perm,
                                   double abort_threshold, int abort_check_at,
                                   std::uint64_t seed) {
  const std::size_t rounds = ds.rounds();
  if (rounds < 2) throw std::invalid_argument("permutation_test: need at least 2 rounds");
  if (n_perm < 1) throw std::invalid_argument("permutation_test: n_perm must be >= 1");

  const std::size_t goods = ds.goods();
  std::vector<double> budgets(rounds);
  std::vector<std::vector<double>> shares(rounds, std::vector<double>(goods));
  for (std::size_t t = 0; t < rounds; ++t) {
    const auto& obs = ds.observations[t];
    budgets[t] = expenditure(obs);
    for (std::size_t g = 0; g < goods; ++g) {
      shares[t][g] = obs.prices[g] * obs.bundle[g] / budgets[t];
    }
  }
  const double observed = ccei(ds);

  Rng rng(seed, ds.label.empty() ? "permtest" : ds.label);
  std::vector<std::size_t> perm(rounds);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rows(rounds);

  int at_or_above = 0;
  int draws = 0;
  for (int it = 0; it < n_perm; ++it) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    for (std::size_t t = 0; t < rounds; ++t) {
      const auto& obs = ds.observations[t];
      const auto& share = shares[perm[t]];
      rows[t].first = obs.prices;
      rows[t].second.resize(goods);
      for (std::size_t g = 0; g < goods; ++g) {
        rows[t].second[g] = share[g] * budgets[t] / obs.prices[g];
      }
    }
    const double score = ccei(make_dataset(rows));
    if (score >= observed - 1e-12) ++at_or_above;
    ++draws;
    if (draws == abort_check_at && draws < n_perm) {
      const double running = static_cast<double>(at_or_above) / draws;
      if (running > abort_threshold) {
        return {running, true, draws};
      }
    }
  }
  return {static_cast<double>(at_or_above) / draws, false, draws};
}

}  // namespace revpref
