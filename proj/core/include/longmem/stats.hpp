#pragma once

#include <span>
#include <vector>

namespace longmem {

double normal_log_pdf(double x, double mean, double sd);

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double mean(std::span<const double> x);
// Unbiased sample variance.
double sample_variance(std::span<const double> x);

// Quantile of an unweighted sample (linear interpolation, type 7).
double quantile(std::vector<double> x, double p);

// Quantile of a weighted sample: smallest value whose cumulative weight
// reaches p. Weights must be normalized.
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double p);

// Sample autocorrelations at lags 0..K about the sample mean. Throws
// NumericalError when the series has zero variance.
std::vector<double> acf(std::span<const double> x, std::size_t K);

}  // namespace longmem
