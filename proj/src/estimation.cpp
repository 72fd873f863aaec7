#include "revpref/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "revpref/stats.hpp"

namespace revpref {

namespace {

constexpr double kShareEps = 1e-12;     // boundary detection for censoring
constexpr double kLogGMin = -30.0, kLogGMax = 30.0;
constexpr double kMMin = -1.0 + 1e-6;   // keeps rho = m/(1+m) on its domain
constexpr double kMMax = 1e6;
constexpr double kLogSigmaMin = -9.2103403719761836;  // log 1e-4
constexpr double kLogSigmaMax = 4.605170185988092;    // log 100

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

struct ShareData {
  std::vector<double> share;      // p1 x1 / E
  std::vector<double> log_ratio;  // log(p1 / p2)
  bool any_censored = false;      // some share at 0 or 1
};

ShareData extract_shares(const ChoiceDataset& ds, bool sort_payouts) {
  if (ds.goods() != 2) {
    throw std::invalid_argument("estimation requires exactly two goods");
  }
  ShareData data;
  for (const auto& obs : ds.observations) {
    double p1 = obs.prices[0], p2 = obs.prices[1];
    double x1 = obs.bundle[0], x2 = obs.bundle[1];
    if (sort_payouts && x2 > x1) {
      std::swap(p1, p2);
      std::swap(x1, x2);
    }
    const double budget = p1 * x1 + p2 * x2;
    double s = p1 * x1 / budget;
    if (s < -1e-9 || s > 1.0 + 1e-9) {
      throw std::invalid_argument("expenditure share outside [0, 1]");
    }
    s = std::clamp(s, 0.0, 1.0);
    if (s <= kShareEps || s >= 1.0 - kShareEps) data.any_censored = true;
    data.share.push_back(s);
    data.log_ratio.push_back(std::log(p1) - std::log(p2));
  }
  return data;
}

// Log likelihood and gradient in the optimization coordinates
// theta = (log g, m, log sigma).
struct Eval {
  double ll = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
};

Eval evaluate(const ShareData& data, double log_g, double m, double log_sigma) {
  const double sigma = std::exp(log_sigma);
  Eval out;
  for (std::size_t t = 0; t < data.share.size(); ++t) {
    const double mu = sigmoid(log_g - m * data.log_ratio[t]);
    const double dmu_dlogg = mu * (1.0 - mu);
    const double dmu_dm = -data.log_ratio[t] * mu * (1.0 - mu);
    const double s = data.share[t];
    double dll_dmu, dll_dsigma;
    if (s <= kShareEps) {
      const double z = -mu / sigma;
      const double lambda = inverse_mills(z);
      out.ll += norm_logcdf(z);
      dll_dmu = -lambda / sigma;
      dll_dsigma = lambda * mu / (sigma * sigma);
    } else if (s >= 1.0 - kShareEps) {
      const double z = (mu - 1.0) / sigma;
      const double lambda = inverse_mills(z);
      out.ll += norm_logcdf(z);
      dll_dmu = lambda / sigma;
      dll_dsigma = lambda * (1.0 - mu) / (sigma * sigma);
    } else {
      const double z = (s - mu) / sigma;
      out.ll += norm_logpdf(z) - log_sigma;
      dll_dmu = z / sigma;
      dll_dsigma = (z * z - 1.0) / sigma;
    }
    out.grad[0] += dll_dmu * dmu_dlogg;
    out.grad[1] += dll_dmu * dmu_dm;
    out.grad[2] += dll_dsigma * sigma;  // d/d(log sigma)
  }
  return out;
}

using Vec3 = std::array<double, 3>;

Vec3 clamp_box(Vec3 x) {
  x[0] = std::clamp(x[0], kLogGMin, kLogGMax);
  x[1] = std::clamp(x[1], kMMin, kMMax);
  x[2] = std::clamp(x[2], kLogSigmaMin, kLogSigmaMax);
  return x;
}

bool at_lower(const Vec3& x, int i) {
  static constexpr Vec3 lo{kLogGMin, kMMin, kLogSigmaMin};
  return x[i] <= lo[i] + 1e-12;
}

bool at_upper(const Vec3& x, int i) {
  static constexpr Vec3 hi{kLogGMax, kMMax, kLogSigmaMax};
  return x[i] >= hi[i] - 1e-12;
}

// Gradient of the minimized objective (-ll) with outward-pointing components
// zeroed at active bounds.
Vec3 project(const Vec3& x, const Vec3& grad) {
  Vec3 pg = grad;
  for (int i = 0; i < 3; ++i) {
    if (at_lower(x, i) && pg[i] > 0.0) pg[i] = 0.0;
    if (at_upper(x, i) && pg[i] < 0.0) pg[i] = 0.0;
  }
  return pg;
}

double inf_norm(const Vec3& v) {
  return std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2])});
}

struct FitResult {
  Vec3 x{};
  double ll = -std::numeric_limits<double>::infinity();
  bool grad_ok = false;
  int iterations = 0;
};

// With sigma pinned at its floor and every share interior, the likelihood
// profile in (log g, m) is plain least squares on the share residuals, where
// BFGS stalls against the 1/sigma^2 curvature. A few Gauss-Newton steps
// drive the residuals to machine precision.
void gauss_newton_polish(const ShareData& data, Vec3& x) {
  for (int iter = 0; iter < 30; ++iter) {
    double aa = 0.0, am = 0.0, mm = 0.0, ra = 0.0, rm = 0.0;
    for (std::size_t t = 0; t < data.share.size(); ++t) {
      const double mu = sigmoid(x[0] - x[1] * data.log_ratio[t]);
      const double da = mu * (1.0 - mu);
      const double dm = -data.log_ratio[t] * da;
      const double r = data.share[t] - mu;
      aa += da * da;
      am += da * dm;
      mm += dm * dm;
      ra += da * r;
      rm += dm * r;
    }
    const double det = aa * mm - am * am;
    if (std::fabs(det) < 1e-30) return;
    const double step_a = (mm * ra - am * rm) / det;
    const double step_m = (aa * rm - am * ra) / det;
    const Vec3 moved = clamp_box({x[0] + step_a, x[1] + step_m, x[2]});
    if (moved[0] == x[0] && moved[1] == x[1]) return;
    x = moved;
    if (std::fabs(step_a) < 1e-15 && std::fabs(step_m) < 1e-15) return;
  }
}

// Box-constrained BFGS minimization of -ll from one start.
FitResult bfgs_fit(const ShareData& data, Vec3 x0) {
  constexpr int kMaxIter = 400;
  FitResult result;
  Vec3 x = clamp_box(x0);
  Eval ev = evaluate(data, x[0], x[1], x[2]);
  Vec3 g{-ev.grad[0], -ev.grad[1], -ev.grad[2]};
  double f = -ev.ll;

  double h[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto reset_h = [&] {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) h[i][j] = i == j ? 1.0 : 0.0;
    }
  };

  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    const Vec3 pg = project(x, g);
    if (inf_norm(pg) <= 1e-10 * std::max(1.0, std::fabs(f))) break;

    Vec3 d{};
    for (int i = 0; i < 3; ++i) {
      d[i] = -(h[i][0] * pg[0] + h[i][1] * pg[1] + h[i][2] * pg[2]);
    }
    double slope = d[0] * pg[0] + d[1] * pg[1] + d[2] * pg[2];
    if (!(slope < 0.0)) {
      reset_h();
      d = {-pg[0], -pg[1], -pg[2]};
      slope = -(pg[0] * pg[0] + pg[1] * pg[1] + pg[2] * pg[2]);
    }

    double alpha = 1.0;
    Vec3 x_new{};
    Eval ev_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = clamp_box({x[0] + alpha * d[0], x[1] + alpha * d[1], x[2] + alpha * d[2]});
      const Vec3 step{x_new[0] - x[0], x_new[1] - x[1], x_new[2] - x[2]};
      const double gs = g[0] * step[0] + g[1] * step[1] + g[2] * step[2];
      ev_new = evaluate(data, x_new[0], x_new[1], x_new[2]);
      f_new = -ev_new.ll;
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * gs) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    const Vec3 g_new{-ev_new.grad[0], -ev_new.grad[1], -ev_new.grad[2]};
    const Vec3 s{x_new[0] - x[0], x_new[1] - x[1], x_new[2] - x[2]};
    const Vec3 y{g_new[0] - g[0], g_new[1] - g[1], g_new[2] - g[2]};
    const double sy = s[0] * y[0] + s[1] * y[1] + s[2] * y[2];

    bool bound_changed = false;
    for (int i = 0; i < 3; ++i) {
      if (at_lower(x, i) != at_lower(x_new, i) || at_upper(x, i) != at_upper(x_new, i)) {
        bound_changed = true;
      }
    }

    if (bound_changed) {
      reset_h();
    } else if (sy > 1e-12) {
      // BFGS inverse update
      double hy[3];
      for (int i = 0; i < 3; ++i) {
        hy[i] = h[i][0] * y[0] + h[i][1] * y[1] + h[i][2] * y[2];
      }
      const double yhy = y[0] * hy[0] + y[1] * hy[1] + y[2] * hy[2];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          h[i][j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) -
                     (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
      }
    }

    x = x_new;
    g = g_new;
    f = f_new;
  }

  if (!data.any_censored && at_lower(x, 2)) {
    gauss_newton_polish(data, x);
    ev = evaluate(data, x[0], x[1], x[2]);
    g = {-ev.grad[0], -ev.grad[1], -ev.grad[2]};
    f = -ev.ll;
  }

  const Vec3 pg = project(x, g);
  result.x = x;
  result.ll = -f;
  result.iterations = iter;
  result.grad_ok = inf_norm(pg) <= 1e-8 * std::max(1.0, std::fabs(f));
  return result;
}

}  // namespace

double predicted_share(double g, double m, double price_ratio) {
  if (!(g > 0.0)) throw std::invalid_argument("predicted_share: g must be positive");
  if (!(price_ratio > 0.0)) {
    throw std::invalid_argument("predicted_share: price ratio must be positive");
  }
  return sigmoid(std::log(g) - m * std::log(price_ratio));
}

double share_loglik(double g, double m, double sigma, const ChoiceDataset& ds) {
  if (!(sigma > 0.0)) throw std::invalid_argument("share_loglik: sigma must be positive");
  if (!(g > 0.0)) throw std::invalid_argument("share_loglik: g must be positive");
  const ShareData data = extract_shares(ds, false);
  return evaluate(data, std::log(g), m, std::log(sigma)).ll;
}

std::array<double, 3> share_loglik_grad(double g, double m, double sigma,
                                        const ChoiceDataset& ds) {
  if (!(sigma > 0.0)) throw std::invalid_argument("share_loglik_grad: sigma must be positive");
  if (!(g > 0.0)) throw std::invalid_argument("share_loglik_grad: g must be positive");
  const ShareData data = extract_shares(ds, false);
  const Eval ev = evaluate(data, std::log(g), m, std::log(sigma));
  // chain rule back from (log g, m, log sigma)
  return {ev.grad[0] / g, ev.grad[1], ev.grad[2] / sigma};
}

EstimationResult estimate_ces(const ChoiceDataset& ds, ModelKind kind) {
  if (ds.rounds() < 3) {
    throw std::invalid_argument("estimate_ces: need at least 3 observations");
  }
  const ShareData data =
      extract_shares(ds, kind == ModelKind::disappointment_aversion);

  const auto [lo_it, hi_it] =
      std::minmax_element(data.log_ratio.begin(), data.log_ratio.end());
  if (*hi_it - *lo_it <= 1e-9) {
    throw std::invalid_argument("estimate_ces: price ratios carry no variation");
  }

  const double g_starts[] = {0.25, 1.0, 4.0};
  const double m_starts[] = {-0.5, 0.5, 2.0};

  FitResult best;
  bool have_best = false;
  for (double g0 : g_starts) {
    for (double m0 : m_starts) {
      // start sigma at the residual spread of this start
      std::vector<double> resid;
      resid.reserve(data.share.size());
      for (std::size_t t = 0; t < data.share.size(); ++t) {
        resid.push_back(data.share[t] - sigmoid(std::log(g0) - m0 * data.log_ratio[t]));
      }
      const double sigma0 = std::clamp(sample_sd(resid), 1e-3, 1.0);
      const FitResult fit = bfgs_fit(data, {std::log(g0), m0, std::log(sigma0)});
      if (!have_best || fit.ll > best.ll + 1e-10 ||
          (std::fabs(fit.ll - best.ll) <= 1e-10 &&
           std::fabs(fit.x[1]) < std::fabs(best.x[1]))) {
        best = fit;
        have_best = true;
      }
    }
  }

  EstimationResult result;
  result.g = std::exp(best.x[0]);
  result.m = best.x[1];
  result.sigma = std::exp(best.x[2]);
  result.rho = best.x[1] / (1.0 + best.x[1]);
  result.alpha = sigmoid(best.x[0] / (1.0 + best.x[1]));
  result.loglik = best.ll;
  result.iterations = best.iterations;
  const bool m_capped = at_lower(best.x, 1) || at_upper(best.x, 1);
  const bool g_capped = at_lower(best.x, 0) || at_upper(best.x, 0);
  result.converged = best.grad_ok && !m_capped && !g_capped;
  return result;
}

}  // namespace revpref
