#include <doctest.h>

#include <cmath>
#include <numbers>

#include "longmem/error.hpp"
#include "longmem/sisr.hpp"
#include "longmem/stats.hpp"
#include "oracles.hpp"

using namespace longmem;

namespace {

ModelSpec paper_model(bool learn_phi) {
  ModelSpec m;
  m.latent = FarimaSpec{{0.8}, 0.3, {}, 1.0};
  if (learn_phi) m.learned = {LearnedParam{ParamKind::kAr, 0, -0.99, 0.99}};
  m.link = ObservationLink::kAbs;
  m.obs_noise_sd = 2.0;
  return m;
}

FilterOptions options(std::size_t n, std::uint64_t seed, double delta = 1.0) {
  FilterOptions o;
  o.num_particles = n;
  o.seed = seed;
  o.kernel = config_from_delta(delta);
  return o;
}

FilterOptions no_resampling(FilterOptions o) {
  o.resample.every_step = false;
  o.resample.ess_threshold = 0.0;
  return o;
}

// Wider-than-transition Gaussian proposal.
class InflatedProposal : public Proposal {
 public:
  double sample(const ConditionalLaw& law, double, const ModelSpec&, Rng& rng) const override {
    return law.mean + 2.0 * law.sd * rng.normal();
  }
  double log_density(double x, const ConditionalLaw& law, double, const ModelSpec&) const override {
    return normal_log_pdf(x, law.mean, 2.0 * law.sd);
  }
};

}  // namespace

TEST_CASE("ess") {
  CHECK(ess(std::vector<double>(8, 0.125)) == doctest::Approx(8.0));
  CHECK(ess(std::vector<double>{0, 1, 0}) == 1.0);
  CHECK(ess(std::vector<double>{0.5, 0.5, 0, 0}) == 2.0);
}

TEST_CASE("log-weight normalization") {
  const std::vector<double> lw{-1.0, 0.3, -7.5, 2.0, 0.0};
  std::vector<double> base, shifted;
  normalize_log_weights(lw, base);
  for (double shift : {-500.0, 500.0}) {
    std::vector<double> moved(lw);
    for (double& v : moved) v += shift;
    normalize_log_weights(moved, shifted);
    for (std::size_t i = 0; i < lw.size(); ++i) {
      CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-13));
    }
  }
  std::vector<double> out;
  CHECK_THROWS_AS(normalize_log_weights(std::vector<double>(4, -800.0), out), TotalWeightUnderflow);
  CHECK_THROWS_AS(normalize_log_weights(std::vector<double>{0.0, std::nan("")}, out),
                  TotalWeightUnderflow);
}

TEST_CASE("multinomial_resample") {
  Rng rng(3);
  const auto all = multinomial_resample(std::vector<double>{0, 0, 1, 0}, rng);
  CHECK(all == std::vector<std::size_t>{2, 2, 2, 2});

  SUBCASE("uniform weights pass a chi-square test") {
    const std::size_t n = 10;
    std::vector<double> counts(n, 0.0);
    const std::vector<double> w(n, 0.1);
    for (int rep = 0; rep < 10000; ++rep) {
      for (auto i : multinomial_resample(w, rng)) counts[i] += 1.0;
    }
    const double expected = 10000.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 21.666);  // chi-square(9) 99% quantile
  }

  SUBCASE("expected copies equal N W_i") {
    const std::vector<double> w{0.05, 0.15, 0.3, 0.5};
    std::vector<double> copies(w.size(), 0.0);
    const int reps = 5000;
    for (int rep = 0; rep < reps; ++rep) {
      for (auto i : multinomial_resample(w, rng)) copies[i] += 1.0;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double N = 4.0;
      const double se = std::sqrt(N * w[i] * (1 - w[i]) / reps);
      CHECK(std::abs(copies[i] / reps - N * w[i]) < 3 * se);
    }
  }

  SUBCASE("resampling keeps the weighted mean in expectation") {
    Rng g(17);
    const std::size_t n = 200;
    std::vector<double> x(n), w(n);
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g.normal();
      tot += (w[i] = g.uniform() * g.uniform());
    }
    for (double& v : w) v /= tot;
    double target = 0.0;
    for (std::size_t i = 0; i < n; ++i) target += w[i] * x[i];
    std::vector<double> means;
    for (int rep = 0; rep < 200; ++rep) {
      double s = 0.0;
      for (auto i : multinomial_resample(w, g)) s += x[i];
      means.push_back(s / n);
    }
    CHECK(std::abs(mean(means) - target) < 3 * std::sqrt(sample_variance(means) / 200));
  }
}

TEST_CASE("systematic_resample") {
  Rng rng(2);
  const auto idx = systematic_resample(std::vector<double>{0.25, 0.25, 0.5}, rng);
  CHECK(idx.size() == 3);
  CHECK(std::count(idx.begin(), idx.end(), 2u) >= 1);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(systematic_resample(std::vector<double>{0, 1, 0}, rng) == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("init weights and resampling") {
  const auto model = paper_model(false);
  SisrFilter raw(model, no_resampling(options(300, 5)));
  raw.init(1.7);
  const auto& c = raw.cloud();
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.log_weights[i] == obs_log_density(model, 1.7, c.trajectories[i][0]));
  }

  SisrFilter resampled(model, options(300, 5));
  const auto snap = resampled.init(1.7);
  CHECK(snap.resampled);
  for (double w : resampled.cloud().norm_weights) CHECK(w == 1.0 / 300.0);
  resampled.cloud().check_invariants();
  CHECK_THROWS_AS(SisrFilter(model, options(1, 0)), DomainError);
  SisrFilter fresh(model, options(10, 0));
  CHECK_THROWS_AS(fresh.step(0.0), DomainError);
}

TEST_CASE("one-step posterior against grid quadrature") {
  const auto model = paper_model(false);
  const double y1 = 6.0;
  const double g0 = stationary_variance(model.latent);
  // E|X| under prior and posterior by trapezoid rule on a fine grid.
  double z = 0.0, num = 0.0;
  const double lim = 12.0 * std::sqrt(g0), h = lim / 40000.0;
  for (int k = -40000; k <= 40000; ++k) {
    const double x = k * h;
    const double w = std::exp(normal_log_pdf(x, 0.0, std::sqrt(g0)) + obs_log_density(model, y1, x));
    z += w;
    num += w * std::abs(x);
  }
  const double post = num / z;
  const double prior = std::sqrt(2.0 * g0 / std::numbers::pi);
  // obs_noise_sd = 2 makes the observation scale |x|, so the pull is toward |y1|.
  CHECK(std::abs(post - y1) < std::abs(prior - y1));

  for (bool use_proposal : {false, true}) {
    auto o = no_resampling(options(20000, 12));
    if (use_proposal) o.proposal = std::make_shared<InflatedProposal>();
    SisrFilter f(model, o);
    f.init(y1);
    const auto& c = f.cloud();
    double est = 0.0, est2 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      est += c.norm_weights[i] * std::abs(c.trajectories[i][0]);
      est2 += c.norm_weights[i] * c.trajectories[i][0] * c.trajectories[i][0];
    }
    const double sd = std::sqrt(est2 - est * est);
    const double se = sd / std::sqrt(ess(c.norm_weights));
    CHECK(std::abs(est - post) < 4 * se);
  }
}

TEST_CASE("step weights and invariants") {
  const auto model = paper_model(true);
  const auto data = simulate_model(paper_model(false), 40, 8);

  SisrFilter every(model, options(200, 9, 0.98));
  every.init(data.obs[0]);
  for (std::size_t t = 1; t < data.obs.size(); ++t) {
    const auto snap = every.step(data.obs[t]);
    const auto& c = every.cloud();
    c.check_invariants();
    CHECK(snap.t == t + 1);
    CHECK(snap.q025 <= snap.q50);
    CHECK(snap.q50 <= snap.q975);
    CHECK(snap.ess >= 1.0);
    CHECK(snap.ess <= 200.0);
    // Resampling carries each raw log-weight with its trajectory, and the
    // previous weights were uniform, so the bootstrap weight is the likelihood.
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c.log_weights[i] == obs_log_density(model, data.obs[t], c.trajectories[i].back()));
      CHECK(std::abs(c.theta(i)[0]) < 1.0);
    }
  }
}

TEST_CASE("uninformative observations keep weights uniform") {
  auto model = paper_model(false);
  model.link = ObservationLink::kAdditive;
  model.obs_noise_sd = 1e12;
  SisrFilter f(model, no_resampling(options(400, 1)));
  f.init(0.3);
  for (int t = 0; t < 5; ++t) {
    const auto snap = f.step(-0.2);
    CHECK(snap.ess == doctest::Approx(400.0).epsilon(1e-9));
    CHECK_FALSE(snap.resampled);
  }
}

TEST_CASE("ESS-threshold policy carries weights between steps") {
  const auto model = paper_model(false);
  auto o = options(300, 2);
  o.resample.every_step = false;
  o.resample.ess_threshold = 0.5;
  SisrFilter f(model, o);
  const auto data = simulate_model(model, 30, 4);
  f.init(data.obs[0]);
  for (std::size_t t = 1; t < 30; ++t) {
    const auto snap = f.step(data.obs[t]);
    CHECK(snap.resampled == (snap.ess < 150.0));
    if (!snap.resampled) {
      const double uniform = 1.0 / 300.0;
      bool all_uniform = true;
      for (double w : f.cloud().norm_weights) all_uniform = all_uniform && w == uniform;
      CHECK_FALSE(all_uniform);
    }
    f.cloud().check_invariants();
  }
}

TEST_CASE("Kalman oracle on a linear-Gaussian model") {
  ModelSpec m;
  m.latent = FarimaSpec{{0.8}, 0.0, {}, 1.0};
  m.link = ObservationLink::kAdditive;
  m.obs_noise_sd = 1.0;
  const auto data = simulate_model(m, 50, 31);
  const auto exact = oracle::kalman_ar1(data.obs, 0.8, 1.0, 1.0);
  const auto res = run(m, data.obs, options(3000, 5));
  double sse = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    sse += std::pow(res.snapshots[t].state_mean - exact[t], 2);
  }
  CHECK(std::sqrt(sse / 50) <= 0.05 * std::sqrt(1.0 / 0.36));
}

TEST_CASE("point-mass prior with delta = 1 is a plain bootstrap filter") {
  ModelSpec learned = paper_model(true);
  learned.learned[0].lower = learned.learned[0].upper = 0.8;
  const auto data = simulate_model(paper_model(false), 25, 6);
  const std::size_t n = 150;
  const std::uint64_t seed = 77;
  const auto res = run(learned, data.obs, options(n, seed));

  // Minimal bootstrap SISR written against the primitive operations only.
  const FarimaSpec spec = paper_model(false).latent;
  const double sd0 = std::sqrt(stationary_variance(spec));
  std::vector<std::vector<double>> paths(n);
  std::vector<double> lw(n), w;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = Rng::derive(seed, tag(StreamTag::kInitState), 0, i);
    paths[i] = {sd0 * r.normal()};
  }
  for (std::size_t t = 0; t < data.obs.size(); ++t) {
    if (t > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto law = conditional_law(spec, paths[i]);
        Rng r = Rng::derive(seed, tag(StreamTag::kPropagate), t + 1, i);
        paths[i].push_back(law.mean + law.sd * r.normal());
      }
    }
    for (std::size_t i = 0; i < n; ++i) lw[i] = obs_log_density(learned, data.obs[t], paths[i].back());
    normalize_log_weights(lw, w);
    double m = 0.0;
    {
      CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) s.add(w[i] * paths[i].back());
      m = s.value();
    }
    CHECK(m == res.snapshots[t].state_mean);
    Rng rr = Rng::derive(seed, tag(StreamTag::kResample), t + 1);
    const auto idx = multinomial_resample(w, rr);
    auto next = paths;
    for (std::size_t i = 0; i < n; ++i) next[i] = paths[idx[i]];
    paths.swap(next);
  }
  CHECK(paths == res.cloud.trajectories);
  for (double th : res.cloud.params) CHECK(th == 0.8);
}

TEST_CASE("determinism and thread independence") {
  const auto model = paper_model(true);
  const auto data = simulate_model(paper_model(false), 40, 2);
  auto o = options(256, 10, 0.98);
  const auto a = run(model, data.obs, o);
  const auto b = run(model, data.obs, o);
  o.threads = 3;
  const auto c = run(model, data.obs, o);
  for (std::size_t t = 0; t < 40; ++t) {
    CHECK(a.snapshots[t].state_mean == b.snapshots[t].state_mean);
    CHECK(a.snapshots[t].state_mean == c.snapshots[t].state_mean);
    CHECK(a.snapshots[t].theta_bar == c.snapshots[t].theta_bar);
  }
  CHECK(a.cloud.trajectories == c.cloud.trajectories);
  CHECK(a.log.seed == 10);
  CHECK(a.log.num_particles == 256);
}

TEST_CASE("state-mean variance shrinks like 1/N") {
  const auto model = paper_model(false);
  const auto data = simulate_model(model, 60, 13);
  auto spread = [&](std::size_t n) {
    std::vector<double> finals;
    for (std::uint64_t s = 0; s < 30; ++s) {
      finals.push_back(run(model, data.obs, options(n, 1000 + s)).snapshots.back().state_mean);
    }
    return sample_variance(finals);
  };
  const double ratio = spread(2000) / spread(500);
  MESSAGE("variance ratio N=2000 / N=500: " << ratio);
  CHECK(ratio > 0.12);
  CHECK(ratio < 0.5);
}

TEST_CASE("windowed conditioning") {
  auto model = paper_model(false);
  model.window = 5;
  const auto data = simulate_model(paper_model(false), 30, 1);
  const auto res = run(model, data.obs, options(100, 3));
  CHECK(res.snapshots.size() == 30);
  CHECK(res.cloud.trajectories[0].size() == 30);
}
