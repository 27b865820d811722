#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "longmem/rng.hpp"
#include "longmem/sisr.hpp"
#include "longmem/ssm.hpp"

namespace longmem {

struct ForecastResult {
  std::size_t horizon = 0;       // 1-based step after the split
  double point = 0.0;            // predictive mean of Y
  double lo = 0.0;               // lower interval end
  double hi = 0.0;               // upper interval end
  std::optional<double> realized;
};

struct ResidualDiagnostics {
  std::vector<double> residuals;  // y_t / posterior mean observation scale
  std::vector<double> acf;        // lags 0..K
  double ljung_box = 0.0;
};

// Draws of Y_{t+1}: particle i with probability W_i, X_{t+1} from its
// transition law under theta_i, then Y_{t+1} from the observation law.
std::vector<double> predictive_draws(const ParticleCloud& cloud, const ModelSpec& model,
                                     std::size_t n_draws, Rng& rng);

// Central interval from predictive draws at the given nominal level.
std::pair<double, double> predictive_interval(std::span<const double> draws, double level = 0.95);

struct RollingForecastOptions {
  std::size_t split = 0;       // observations used for the initial fit
  std::size_t horizon = 20;    // one-step forecasts after the split
  std::size_t draws = 2000;    // bootstrap predictive draws per step
  double level = 0.95;
};

struct RollingForecast {
  std::vector<ForecastResult> forecasts;
  std::vector<FilterSnapshot> snapshots;  // every assimilated time point
};

// Fits on data[0, split), then for each step predicts the next value,
// assimilates the realized observation, and moves on.
RollingForecast rolling_forecast(const ModelSpec& model, std::span<const double> data,
                                 const RollingForecastOptions& rolling,
                                 const FilterOptions& filter);

// Standardized residuals y_t / obs_scale_mean_t, their ACF at lags 0..K and the
// Ljung-Box statistic. Throws NumericalError on zero-variance residuals.
ResidualDiagnostics residual_diagnostics(std::span<const FilterSnapshot> snapshots,
                                         std::span<const double> data, std::size_t K);

}  // namespace longmem
