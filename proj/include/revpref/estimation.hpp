#pragma once

#include <array>

#include "revpref/core.hpp"

namespace revpref {

enum class ModelKind {
  ces,
  // Two equiprobable states weighted alpha / (1 - alpha); observations are
  // sorted so the first coordinate is the larger payout before fitting.
  disappointment_aversion,
};

struct EstimationResult {
  double alpha = 0.5;
  double rho = 0.0;
  double g = 1.0;
  double m = 0.0;
  double sigma = 1.0;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Expenditure share of good 1 implied by (g, m) at a price ratio p1/p2:
/// g / ((p1/p2)^m + g), evaluated in logistic form for stability.
double predicted_share(double g, double m, double price_ratio);

/// Censored-normal log likelihood of the observed expenditure shares around
/// the predicted shares: interior shares contribute normal densities, shares
/// at 0 or 1 contribute the matching normal tail probability. Requires K = 2
/// and sigma > 0.
double share_loglik(double g, double m, double sigma, const ChoiceDataset& ds);

/// Gradient of share_loglik in (g, m, sigma).
std::array<double, 3> share_loglik_grad(double g, double m, double sigma,
                                        const ChoiceDataset& ds);

/// Maximum likelihood fit over (log g, m, log sigma) by multi-start BFGS
/// (9 starts: g in {0.25, 1, 4} x m in {-0.5, 0.5, 2}), mapped back to
/// (alpha, rho). Ties between starts break toward higher likelihood, then
/// lower |m|. Requires T >= 3 and at least two distinct price ratios.
EstimationResult estimate_ces(const ChoiceDataset& ds,
                              ModelKind kind = ModelKind::ces);

}  // namespace revpref
