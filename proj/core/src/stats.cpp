#include "longmem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "longmem/error.hpp"

namespace longmem {

double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

double mean(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  CompensatedSum s;
  for (double v : x) s.add((v - m) * (v - m));
  return s.value() / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw DomainError("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double p) {
  if (values.empty()) throw DomainError("quantile of empty sample");
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += weights[i];
    if (cum >= p) return values[i];
  }
  return values[order.back()];
}

std::vector<double> acf(std::span<const double> x, std::size_t K) {
  const std::size_t n = x.size();
  if (K >= n) throw DomainError("acf: lag count must be below the series length");
  const double m = mean(x);
  double c0 = 0.0, peak = 0.0;
  for (double v : x) {
    c0 += (v - m) * (v - m);
    peak = std::max(peak, std::abs(v));
  }
  const double noise = 1e-14 * peak;
  if (!(c0 > static_cast<double>(n) * noise * noise)) throw NumericalError("acf: series has zero variance");
  std::vector<double> r(K + 1);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (x[t] - m) * (x[t - k] - m);
    r[k] = ck / c0;
  }
  return r;
}

}  // namespace longmem
