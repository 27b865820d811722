#pragma once

// Test-only reference computations. Nothing here calls into the library's
// weight recurrences, so the checks stay independent of the code under test.

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace oracle {

// binom(d, k) (-1)^k from Gamma functions.
inline double frac_binomial_term(double d, std::size_t k) {
  using boost::math::tgamma;
  const double kk = static_cast<double>(k);
  // Gamma(d + 1) / (Gamma(k + 1) Gamma(d - k + 1)); reflection keeps it finite
  // for non-integer d.
  if (d == std::floor(d) && kk > d && d >= 0) return 0.0;
  const double b = tgamma(d + 1.0) / (tgamma(kk + 1.0) * tgamma(d - kk + 1.0));
  return (k % 2 == 0 ? 1.0 : -1.0) * b;
}

inline std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b,
                                    std::size_t L) {
  std::vector<double> out(L + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= L; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= L; ++j) out[i + j] += a[i] * b[j];
  return out;
}

// ARFIMA(0, d, 0) autocovariance straight from the Gamma-function formula.
inline double arfima_acvf(double d, double sigma, std::size_t k) {
  using boost::math::lgamma;
  if (d == 0.0) return k == 0 ? sigma * sigma : 0.0;
  const double kk = static_cast<double>(k);
  const double log_g = lgamma(1.0 - 2.0 * d) - lgamma(1.0 - d) - lgamma(d) + lgamma(kk + d) -
                       lgamma(kk + 1.0 - d);
  // Gamma(d) < 0 for d < 0; lgamma returns log|.|.
  const double sign = d < 0.0 ? -1.0 : 1.0;
  if (k == 0) {
    return sigma * sigma * std::exp(lgamma(1.0 - 2.0 * d) - 2.0 * lgamma(1.0 - d));
  }
  return sign * sigma * sigma * std::exp(log_g);
}

// One-step ARMA predictor with zero pre-sample values and innovations.
inline double arma_recursive_mean(std::span<const double> ar, std::span<const double> ma,
                                  std::span<const double> history) {
  const std::size_t n = history.size();
  std::vector<double> eta(n, 0.0);
  auto predict = [&](std::size_t t) {
    double m = 0.0;
    for (std::size_t j = 1; j <= ar.size() && j <= t; ++j) m += ar[j - 1] * history[t - j];
    for (std::size_t j = 1; j <= ma.size() && j <= t; ++j) m += ma[j - 1] * eta[t - j];
    return m;
  };
  for (std::size_t t = 0; t < n; ++t) eta[t] = history[t] - predict(t);
  return predict(n);
}

// Scalar Kalman filter for x_t = phi x_{t-1} + eta, y_t = x_t + eps.
inline std::vector<double> kalman_ar1(std::span<const double> y, double phi, double q, double r) {
  std::vector<double> means(y.size());
  double m = 0.0;
  double p = q / (1.0 - phi * phi);
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t > 0) {
      m = phi * m;
      p = phi * phi * p + q;
    }
    const double k = p / (p + r);
    m += k * (y[t] - m);
    p *= 1.0 - k;
    means[t] = m;
  }
  return means;
}

}  // namespace oracle
