#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace longmem {

// Log-periodogram (Geweke / Porter-Hudak) estimate of the memory parameter.
struct GphEstimate {
  double d_hat = 0.0;
  double std_error = 0.0;  // asymptotic: pi / sqrt(24 m)
  std::size_t bandwidth = 0;
  std::size_t n = 0;
};

inline constexpr double kProxyFloor = 1e-10;

// I(lambda_j) = |sum_t (x_t - xbar) e^{-i t lambda_j}|^2 / (2 pi n) at the
// Fourier frequencies lambda_j = 2 pi j / n, j = 1..floor((n-1)/2), or only
// j = 1..max_j when given. Requires n >= 8.
std::vector<double> periodogram(std::span<const double> x,
                                std::optional<std::size_t> max_j = std::nullopt);

// Regression of log I(lambda_j) on -log(4 sin^2(lambda_j / 2)) for
// j = 1..floor(n^bandwidth_exponent). Requires n >= 64.
GphEstimate gph(std::span<const double> x, double bandwidth_exponent = 0.5);

// log(y_t^2 + kProxyFloor), mean removed. Requires n >= 64.
std::vector<double> volatility_proxy(std::span<const double> returns);

}  // namespace longmem
