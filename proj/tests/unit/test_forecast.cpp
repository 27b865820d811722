#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "longmem/error.hpp"
#include "longmem/forecast.hpp"
#include "longmem/stats.hpp"

using namespace longmem;

namespace {

ParticleCloud hand_cloud(std::vector<std::vector<double>> paths, std::vector<double> weights) {
  ParticleCloud c;
  c.t = paths.front().size();
  c.trajectories = std::move(paths);
  c.norm_weights = std::move(weights);
  c.log_weights.assign(c.norm_weights.size(), 0.0);
  return c;
}

ModelSpec ar1(ObservationLink link, double obs_sd, double sigma_eta = 1.0) {
  ModelSpec m;
  m.latent = FarimaSpec{{0.5}, 0.0, {}, sigma_eta};
  m.link = link;
  m.obs_noise_sd = obs_sd;
  return m;
}

ModelSpec lmsv() {
  ModelSpec m;
  m.latent = FarimaSpec{{0.842}, 0.2, {0.01}, 1.0};
  m.learned = {LearnedParam{ParamKind::kAr, 0, -0.99, 0.99},
               LearnedParam{ParamKind::kMa, 0, -0.99, 0.99}};
  m.link = ObservationLink::kExpHalf;
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("predictive draws from a degenerate transition") {
  auto m = ar1(ObservationLink::kAdditive, 1e-9, 1e-9);
  m.latent.ar = {0.8};
  const auto cloud = hand_cloud({{1.0}}, {1.0});
  Rng rng(1);
  for (double y : predictive_draws(cloud, m, 100, rng)) CHECK(std::abs(y - 0.8) < 1e-5);  // scale floor is 1e-6
}

TEST_CASE("predictive mean of a symmetric link is zero") {
  for (auto link : {ObservationLink::kAbs, ObservationLink::kExpHalf}) {
    const auto cloud = hand_cloud({{0.4, 1.2}, {-0.3, 0.9}}, {0.5, 0.5});
    Rng rng(2);
    const auto draws = predictive_draws(cloud, ar1(link, 1.0), 100000, rng);
    CHECK(std::abs(mean(draws)) < 3.0 * std::sqrt(sample_variance(draws) / 1e5));
  }
}

TEST_CASE("predictive variance follows the law of total variance") {
  const auto m = ar1(ObservationLink::kAdditive, 0.5);
  const auto cloud = hand_cloud({{1.0}, {-2.0}}, {0.3, 0.7});
  // Y | i ~ N(0.5 x_i, 1 + 0.25): mean -0.55, variance 1.25 + 0.4725.
  Rng rng(3);
  const int n = 100000;
  const auto draws = predictive_draws(cloud, m, n, rng);
  const double v = sample_variance(draws);
  CHECK(std::abs(mean(draws) + 0.55) < 3.0 * std::sqrt(1.7225 / n));
  double m4 = 0.0;
  const double dm = mean(draws);
  for (double y : draws) m4 += std::pow(y - dm, 4);
  m4 /= n;
  CHECK(std::abs(v - 1.7225) < 3.0 * std::sqrt((m4 - v * v) / n));
}

TEST_CASE("single-particle draws match direct simulation") {
  const auto m = ar1(ObservationLink::kExpHalf, 1.0);
  const auto cloud = hand_cloud({{0.2, -0.6}}, {1.0});
  Rng rng(4), direct(5);
  const auto a = predictive_draws(cloud, m, 10000, rng);
  std::vector<double> b(10000);
  for (double& y : b) {
    const double x = -0.3 + direct.normal();
    y = std::exp(x / 2.0) * direct.normal();
  }
  CHECK(ks_statistic(a, b) < 1.628 * std::sqrt(2.0 / 10000));  // 1% level
}

TEST_CASE("interval nesting across levels") {
  Rng rng(6);
  std::vector<double> draws(5000);
  for (double& v : draws) v = rng.normal() * (1.0 + rng.uniform());
  const auto i90 = predictive_interval(draws, 0.90);
  const auto i95 = predictive_interval(draws, 0.95);
  const auto i99 = predictive_interval(draws, 0.99);
  CHECK(i99.first <= i95.first);
  CHECK(i95.first <= i90.first);
  CHECK(i90.second <= i95.second);
  CHECK(i95.second <= i99.second);
  CHECK(i90.first < i90.second);
  CHECK_THROWS_AS(predictive_interval(draws, 1.0), DomainError);
}

TEST_CASE("rolling forecast") {
  auto truth = lmsv();
  truth.learned.clear();
  const auto data = simulate_model(truth, 140, 8);
  FilterOptions fo;
  fo.num_particles = 300;
  fo.seed = 12;
  fo.kernel = config_from_delta(0.986);

  RollingForecastOptions none{120, 0, 500, 0.95};
  CHECK(rolling_forecast(lmsv(), data.obs, none, fo).forecasts.empty());

  RollingForecastOptions ro{120, 20, 1000, 0.95};
  const auto out = rolling_forecast(lmsv(), data.obs, ro, fo);
  CHECK(out.forecasts.size() == 20);
  CHECK(out.snapshots.size() == 140);
  int covered = 0;
  for (const auto& f : out.forecasts) {
    CHECK(f.lo < f.hi);
    CHECK(f.realized.has_value());
    covered += *f.realized >= f.lo && *f.realized <= f.hi;
  }
  CHECK(covered >= 16);

  SUBCASE("intervals widen with observation noise") {
    auto noisy = lmsv();
    noisy.obs_noise_sd = 2.0;
    const auto wide = rolling_forecast(noisy, data.obs, ro, fo);
    double narrow_w = 0.0, wide_w = 0.0;
    for (std::size_t h = 0; h < 20; ++h) {
      narrow_w += out.forecasts[h].hi - out.forecasts[h].lo;
      wide_w += wide.forecasts[h].hi - wide.forecasts[h].lo;
    }
    CHECK(wide_w > narrow_w);
  }

  RollingForecastOptions too_long{130, 20, 100, 0.95};
  CHECK_THROWS_AS(rolling_forecast(lmsv(), data.obs, too_long, fo), DomainError);
}

TEST_CASE("residual diagnostics") {
  ModelSpec m;
  m.latent = FarimaSpec{{0.8}, 0.3, {}, 1.0};
  m.link = ObservationLink::kExpHalf;
  const auto data = simulate_model(m, 400, 21);
  FilterOptions fo;
  fo.num_particles = 400;
  fo.seed = 3;
  const auto res = run(m, data.obs, fo);
  const auto diag = residual_diagnostics(res.snapshots, data.obs, 20);
  CHECK(diag.acf[0] == 1.0);
  CHECK(diag.residuals.size() == 400);
  int inside = 0;
  for (std::size_t k = 1; k <= 20; ++k) {
    CHECK(std::abs(diag.acf[k]) <= 1.0);
    inside += std::abs(diag.acf[k]) <= 2.0 / std::sqrt(400.0);
  }
  CHECK(inside >= 18);
  CHECK(diag.ljung_box > 0.0);

  std::vector<FilterSnapshot> flat(50);
  for (auto& s : flat) s.obs_scale_mean = 1.0;
  CHECK_THROWS_AS(residual_diagnostics(flat, std::vector<double>(50, 0.3), 5), NumericalError);
  CHECK_THROWS_AS(residual_diagnostics(flat, std::vector<double>(49, 0.3), 5), DomainError);
}
