#include "longmem/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "longmem/error.hpp"
#include "longmem/fracproc.hpp"
#include "longmem/stats.hpp"

namespace longmem {

std::vector<double> predictive_draws(const ParticleCloud& cloud, const ModelSpec& model,
                                     std::size_t n_draws, Rng& rng) {
  const std::size_t n = cloud.size();
  if (n == 0) throw DomainError("predictive_draws on an empty cloud");
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) cdf[i] = (acc += cloud.norm_weights[i]);

  // One transition law per particle, computed lazily.
  std::vector<std::optional<ConditionalLaw>> laws(n);
  std::vector<double> out(n_draws);
  for (std::size_t b = 0; b < n_draws; ++b) {
    const double u = rng.uniform() * acc;
    auto i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (i >= n) i = n - 1;
    if (!laws[i]) {
      const FarimaSpec spec = model.embed(cloud.theta(i));
      laws[i] = conditional_law(spec, cloud.trajectories[i], model.window);
    }
    const double x = laws[i]->mean + laws[i]->sd * rng.normal();
    out[b] = sample_observation(model, x, rng);
  }
  return out;
}

std::pair<double, double> predictive_interval(std::span<const double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  std::vector<double> v(draws.begin(), draws.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile(v, tail), quantile(v, 1.0 - tail)};
}

RollingForecast rolling_forecast(const ModelSpec& model, std::span<const double> data,
                                 const RollingForecastOptions& rolling,
                                 const FilterOptions& filter_options) {
  if (rolling.split < 1) throw DomainError("rolling forecast needs split >= 1");
  if (rolling.split + rolling.horizon > data.size()) {
    throw DomainError("split + horizon exceeds the data length");
  }
  if (rolling.draws < 2) throw DomainError("rolling forecast needs at least 2 draws");
  RollingForecast out;
  SisrFilter filter(model, filter_options);
  out.snapshots.push_back(filter.init(data[0]));
  for (std::size_t t = 1; t < rolling.split; ++t) out.snapshots.push_back(filter.step(data[t]));

  for (std::size_t h = 1; h <= rolling.horizon; ++h) {
    const std::size_t target = rolling.split + h - 1;  // 0-based index of y being predicted
    Rng rng = Rng::derive(filter_options.seed, tag(StreamTag::kForecast), target);
    const auto draws = predictive_draws(filter.cloud(), model, rolling.draws, rng);
    const auto [lo, hi] = predictive_interval(draws, rolling.level);
    ForecastResult r;
    r.horizon = h;
    r.point = mean(draws);
    r.lo = lo;
    r.hi = hi;
    r.realized = data[target];
    out.forecasts.push_back(r);
    out.snapshots.push_back(filter.step(data[target]));
  }
  return out;
}

ResidualDiagnostics residual_diagnostics(std::span<const FilterSnapshot> snapshots,
                                         std::span<const double> data, std::size_t K) {
  if (snapshots.size() != data.size()) {
    throw DomainError("residual_diagnostics: snapshots and data differ in length");
  }
  if (K >= data.size()) throw DomainError("residual_diagnostics: K must be below the length");
  ResidualDiagnostics out;
  out.residuals.resize(data.size());
  for (std::size_t t = 0; t < data.size(); ++t) {
    out.residuals[t] = data[t] / snapshots[t].obs_scale_mean;
  }
  out.acf = acf(out.residuals, K);
  const double T = static_cast<double>(data.size());
  double q = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    q += out.acf[k] * out.acf[k] / (T - static_cast<double>(k));
  }
  out.ljung_box = T * (T + 2.0) * q;
  return out;
}

}  // namespace longmem
