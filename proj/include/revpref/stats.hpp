#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace revpref {

double mean(std::span<const double> xs);
/// Sample standard deviation (n-1 denominator); 0 for n < 2.
double sample_sd(std::span<const double> xs);

/// log of the standard normal density.
double norm_logpdf(double z);
/// Standard normal CDF.
double norm_cdf(double z);
/// log Phi(z), stable for very negative z.
double norm_logcdf(double z);
/// phi(z) / Phi(z), stable for very negative z.
double inverse_mills(double z);

/// Regularized incomplete beta I_x(a, b).
double betai(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct OlsLine {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least squares of y on x with intercept. Throws std::invalid_argument on
/// size mismatch, n < 2, or zero-variance x.
OlsLine ols_fit(std::span<const double> x, std::span<const double> y);
std::vector<double> ols_residuals(std::span<const double> x, std::span<const double> y);

/// Ranks with average-rank tie handling (1-based ranks).
std::vector<double> average_ranks(std::span<const double> xs);

}  // namespace revpref
