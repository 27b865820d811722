#include "longmem/memest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "longmem/error.hpp"
#include "longmem/stats.hpp"

namespace longmem {

std::vector<double> periodogram(std::span<const double> x, std::optional<std::size_t> max_j) {
  const std::size_t n = x.size();
  if (n < 8) throw DomainError("periodogram needs at least 8 observations");
  std::size_t J = (n - 1) / 2;
  if (max_j) J = std::min(J, *max_j);

  const double xbar = mean(x);
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cos_table[k] = std::cos(angle);
    sin_table[k] = std::sin(angle);
  }
  std::vector<double> out(J);
  const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(n));
  for (std::size_t j = 1; j <= J; ++j) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;  // (t * j) mod n, t counted from zero
    for (std::size_t t = 0; t < n; ++t) {
      const double v = x[t] - xbar;
      re += v * cos_table[idx];
      im -= v * sin_table[idx];
      idx += j;
      if (idx >= n) idx -= n;
    }
    out[j - 1] = (re * re + im * im) * norm;
  }
  return out;
}

GphEstimate gph(std::span<const double> x, double bandwidth_exponent) {
  const std::size_t n = x.size();
  if (n < 64) throw DomainError("gph needs at least 64 observations");
  if (!(bandwidth_exponent > 0.0 && bandwidth_exponent < 1.0)) {
    throw DomainError("gph bandwidth exponent must lie in (0, 1)");
  }
  const std::size_t max_m = (n - 1) / 2;
  auto m = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), bandwidth_exponent)));
  m = std::clamp<std::size_t>(m, 2, max_m);

  auto I = periodogram(x, m);
  double smallest = 0.0;
  for (double v : I) {
    if (v > 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
  }
  if (smallest == 0.0) throw NumericalError("gph: periodogram vanishes at every used frequency");
  for (double& v : I) {
    if (!(v > 0.0)) v = smallest;
  }

  std::vector<double> reg(m), resp(m);
  for (std::size_t j = 1; j <= m; ++j) {
    const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    const double s = std::sin(lambda / 2.0);
    reg[j - 1] = -std::log(4.0 * s * s);
    resp[j - 1] = std::log(I[j - 1]);
  }
  const double rbar = mean(reg);
  const double ybar = mean(resp);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sxy += (reg[j] - rbar) * (resp[j] - ybar);
    sxx += (reg[j] - rbar) * (reg[j] - rbar);
  }
  if (!(sxx > 0.0)) throw NumericalError("gph: regressor has zero variance");
  GphEstimate est;
  est.d_hat = sxy / sxx;
  est.std_error = std::numbers::pi / std::sqrt(24.0 * static_cast<double>(m));
  est.bandwidth = m;
  est.n = n;
  return est;
}

std::vector<double> volatility_proxy(std::span<const double> returns) {
  if (returns.size() < 64) throw DomainError("volatility proxy needs at least 64 returns");
  std::vector<double> out(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t) {
    out[t] = std::log(returns[t] * returns[t] + kProxyFloor);
  }
  const double m = mean(out);
  for (double& v : out) v -= m;
  return out;
}

}  // namespace longmem
