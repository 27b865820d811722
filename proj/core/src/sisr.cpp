#include "longmem/sisr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "longmem/error.hpp"
#include "longmem/parallel.hpp"
#include "longmem/stats.hpp"

namespace longmem {
namespace {

constexpr double kUnderflowLogWeight = -745.0;

// Per-worker scratch for building AR(infinity) coefficients. Consecutive
// particles that share theta (always the case when theta is known) reuse the
// previous coefficients.
struct CoefficientCache {
  std::vector<double> ar;
  std::vector<double> ma;
  std::vector<double> coeffs;
  std::vector<double> theta;
  bool valid = false;

  void load(const ModelSpec& model, std::span<const double> th) {
    ar = model.latent.ar;
    ma = model.latent.ma;
    for (std::size_t k = 0; k < model.learned.size(); ++k) {
      auto& target = model.learned[k].kind == ParamKind::kAr ? ar : ma;
      target[model.learned[k].index] = th[k];
    }
  }

  bool matches(std::span<const double> th) const {
    return valid && std::equal(th.begin(), th.end(), theta.begin(), theta.end());
  }
};

}  // namespace

void ParticleCloud::check_invariants() const {
  const std::size_t n = size();
  if (trajectories.size() != n || log_weights.size() != n) {
    throw NumericalError("particle cloud arrays have inconsistent sizes");
  }
  if (params.size() != n * dim) throw NumericalError("parameter particles have wrong shape");
  for (const auto& path : trajectories) {
    if (path.size() != t) throw NumericalError("trajectory length differs from t");
  }
  CompensatedSum total;
  for (double w : norm_weights) {
    if (!(w >= 0.0)) throw NumericalError("negative normalized weight");
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw NumericalError("weights do not sum to one");
}

double ess(std::span<const double> weights) {
  CompensatedSum s;
  for (double w : weights) s.add(w * w);
  return 1.0 / s.value();
}

double normalize_log_weights(std::span<const double> log_weights, std::vector<double>& out) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw)) throw TotalWeightUnderflow("NaN log-weight");
    peak = std::max(peak, lw);
  }
  if (!(peak >= kUnderflowLogWeight) || std::isinf(peak)) {
    std::ostringstream os;
    os << "all particle weights underflow (max log-weight " << peak << ")";
    throw TotalWeightUnderflow(os.str());
  }
  out.resize(log_weights.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    out[i] = std::exp(log_weights[i] - peak);
    total.add(out[i]);
  }
  const double z = total.value();
  for (double& w : out) w /= z;
  return peak + std::log(z);
}

std::vector<std::size_t> multinomial_resample(std::span<const double> weights, Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto j = static_cast<std::size_t>(it - cdf.begin());
    // Rounding can push u past the last CDF value; never land on a zero weight.
    if (j >= n) j = n - 1;
    while (j > 0 && weights[j] == 0.0) --j;
    idx[i] = j;
  }
  return idx;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> idx(n);
  double total = 0.0;
  for (double w : weights) total += w;
  const double step = total / static_cast<double>(n);
  double u = rng.uniform() * step;
  double cum = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (u > cum && j + 1 < n) cum += weights[++j];
    idx[i] = j;
    u += step;
  }
  return idx;
}

SisrFilter::SisrFilter(ModelSpec model, FilterOptions options)
    : model_(std::move(model)), options_(std::move(options)) {
  model_.validate();
  if (options_.num_particles < 2) throw DomainError("the filter needs at least 2 particles");
  if (options_.resample.ess_threshold < 0.0 || options_.resample.ess_threshold > 1.0) {
    throw DomainError("ESS threshold must lie in [0, 1]");
  }
}

void SisrFilter::grow_pi(std::size_t length) {
  if (pi_.size() >= length) return;
  pi_ = frac_diff_coeffs(model_.latent.d, std::max(length, 2 * pi_.size()) - 1).coeffs;
}

FilterSnapshot SisrFilter::init(double y1) {
  if (!std::isfinite(y1)) throw DomainError("observation is not finite");
  const std::size_t n = options_.num_particles;
  const std::size_t dim = model_.dim();
  cloud_ = ParticleCloud{};
  cloud_.dim = dim;
  cloud_.seed = options_.seed;
  cloud_.trajectories.assign(n, {});
  cloud_.params.assign(n * dim, 0.0);
  cloud_.log_weights.assign(n, 0.0);
  loglik_.assign(n, 0.0);
  spare_.assign(n, {});

  const Proposal* proposal = options_.proposal.get();
  parallel_for(n, options_.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> cached_theta;
    double cached_sd = 0.0;
    bool have = false;
    for (std::size_t i = begin; i < end; ++i) {
      Rng theta_rng = Rng::derive(options_.seed, tag(StreamTag::kInitTheta), 0, i);
      const ParameterVector theta =
          dim > 0 ? sample_prior(model_, theta_rng) : ParameterVector{};
      std::copy(theta.begin(), theta.end(), cloud_.params.begin() + static_cast<std::ptrdiff_t>(i * dim));
      if (!have || theta != cached_theta) {
        cached_sd = std::sqrt(stationary_variance(model_.embed(theta)));
        cached_theta = theta;
        have = true;
      }
      const ConditionalLaw law{0.0, cached_sd};
      Rng rng = Rng::derive(options_.seed, tag(StreamTag::kInitState), 0, i);
      double x;
      double adjust = 0.0;
      if (proposal) {
        x = proposal->sample(law, y1, model_, rng);
        adjust = normal_log_pdf(x, law.mean, law.sd) - proposal->log_density(x, law, y1, model_);
      } else {
        x = law.mean + law.sd * rng.normal();
      }
      cloud_.trajectories[i].assign(1, x);
      loglik_[i] = obs_log_density(model_, y1, x) + adjust;
    }
  });

  cloud_.t = 1;
  initialized_ = true;
  return finish_step(true, {});
}

FilterSnapshot SisrFilter::step(double y) {
  if (!initialized_) throw DomainError("step() called before init()");
  if (!std::isfinite(y)) throw DomainError("observation is not finite");
  const std::size_t n = cloud_.size();
  const std::size_t dim = cloud_.dim;
  const std::size_t t_new = cloud_.t + 1;
  std::size_t m = cloud_.t;
  if (model_.window) m = std::min(m, *model_.window);
  grow_pi(m + 1);

  const LiuWestConfig& kernel = options_.kernel;
  const bool move_theta = dim > 0 && !(kernel.alpha == 1.0 && kernel.h == 0.0);
  std::vector<double> locations;
  std::vector<double> variance;
  if (move_theta) {
    const auto view = cloud_.param_view();
    variance = weighted_variance(view);
    locations = shrink_locations(view, kernel);
    spare_params_.assign(n * dim, 0.0);
  }
  const ParameterDomain domain = [this](std::span<const double> th) {
    return model_.in_domain(th);
  };

  const std::vector<double> prev_weights = cloud_.norm_weights;
  const bool prev_uniform = uniform_;
  const Proposal* proposal = options_.proposal.get();
  const double sigma = model_.latent.sigma_eta;

  parallel_for(n, options_.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    CoefficientCache cache;
    for (std::size_t i = begin; i < end; ++i) {
      std::span<const double> theta = cloud_.theta(i);
      if (move_theta) {
        Rng krng = Rng::derive(options_.seed, tag(StreamTag::kKernel), t_new, i);
        const auto loc = std::span<const double>(locations).subspan(i * dim, dim);
        const auto draw = sample_kernel(loc, kernel, variance, krng, domain);
        std::copy(draw.begin(), draw.end(), spare_params_.begin() + static_cast<std::ptrdiff_t>(i * dim));
        theta = std::span<const double>(spare_params_).subspan(i * dim, dim);
      }
      if (!cache.matches(theta)) {
        cache.load(model_, theta);
        ar_infinity_into(pi_, cache.ar, cache.ma, m, cache.coeffs);
        cache.theta.assign(theta.begin(), theta.end());
        cache.valid = true;
      }
      auto& path = cloud_.trajectories[i];
      const ConditionalLaw law{conditional_mean(cache.coeffs, path, model_.window), sigma};
      Rng rng = Rng::derive(options_.seed, tag(StreamTag::kPropagate), t_new, i);
      double x;
      double adjust = 0.0;
      if (proposal) {
        x = proposal->sample(law, y, model_, rng);
        adjust = normal_log_pdf(x, law.mean, law.sd) - proposal->log_density(x, law, y, model_);
      } else {
        x = law.mean + law.sd * rng.normal();
      }
      path.push_back(x);
      loglik_[i] = obs_log_density(model_, y, x) + adjust;
    }
  });

  if (move_theta) cloud_.params.swap(spare_params_);
  cloud_.t = t_new;
  return finish_step(prev_uniform, prev_weights);
}

FilterSnapshot SisrFilter::finish_step(bool previous_uniform,
                                       std::span<const double> prev_weights) {
  const std::size_t n = loglik_.size();
  if (previous_uniform) {
    cloud_.log_weights = loglik_;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      cloud_.log_weights[i] = loglik_[i] + std::log(prev_weights[i]);
    }
  }
  const double log_total = normalize_log_weights(cloud_.log_weights, cloud_.norm_weights);

  FilterSnapshot snap;
  snap.t = cloud_.t;
  snap.log_likelihood_increment =
      previous_uniform ? log_total - std::log(static_cast<double>(n)) : log_total;
  std::vector<double> current(n);
  CompensatedSum state_mean, scale_mean;
  for (std::size_t i = 0; i < n; ++i) {
    current[i] = cloud_.trajectories[i].back();
    state_mean.add(cloud_.norm_weights[i] * current[i]);
    scale_mean.add(cloud_.norm_weights[i] * observation_scale(model_, current[i]));
  }
  snap.state_mean = state_mean.value();
  snap.obs_scale_mean = scale_mean.value();
  snap.q025 = weighted_quantile(current, cloud_.norm_weights, 0.025);
  snap.q50 = weighted_quantile(current, cloud_.norm_weights, 0.5);
  snap.q975 = weighted_quantile(current, cloud_.norm_weights, 0.975);
  snap.ess = std::clamp(ess(cloud_.norm_weights), 1.0, static_cast<double>(n));
  if (cloud_.dim > 0) {
    snap.theta_bar = weighted_mean(cloud_.param_view());
    snap.theta_var = weighted_variance(cloud_.param_view());
  }

  const auto& policy = options_.resample;
  const bool resample =
      policy.every_step || snap.ess < policy.ess_threshold * static_cast<double>(n);
  if (resample) {
    Rng rng = Rng::derive(options_.seed, tag(StreamTag::kResample), cloud_.t);
    resample_now(rng);
  } else {
    uniform_ = false;
  }
  snap.resampled = resample;
  return snap;
}

void SisrFilter::resample_now(Rng& rng) {
  const std::size_t n = cloud_.size();
  const std::size_t dim = cloud_.dim;
  const auto idx = options_.resample.scheme == ResampleScheme::kSystematic
                       ? systematic_resample(cloud_.norm_weights, rng)
                       : multinomial_resample(cloud_.norm_weights, rng);
  spare_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = cloud_.trajectories[idx[i]];
    spare_[i].assign(src.begin(), src.end());
  }
  cloud_.trajectories.swap(spare_);
  if (dim > 0) {
    std::vector<double> params(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(cloud_.params.begin() + static_cast<std::ptrdiff_t>(idx[i] * dim), dim,
                  params.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    cloud_.params.swap(params);
  }
  std::vector<double> log_weights(n);
  for (std::size_t i = 0; i < n; ++i) log_weights[i] = cloud_.log_weights[idx[i]];
  cloud_.log_weights.swap(log_weights);
  cloud_.norm_weights.assign(n, 1.0 / static_cast<double>(n));
  uniform_ = true;
}

RunResult run(const ModelSpec& model, std::span<const double> observations,
              const FilterOptions& options) {
  if (observations.empty()) throw DomainError("run() needs at least one observation");
  const auto start = std::chrono::steady_clock::now();
  SisrFilter filter(model, options);
  RunResult result;
  result.snapshots.reserve(observations.size());
  result.snapshots.push_back(filter.init(observations[0]));
  for (std::size_t t = 1; t < observations.size(); ++t) {
    result.snapshots.push_back(filter.step(observations[t]));
  }
  result.cloud = filter.cloud();
  result.log.seed = options.seed;
  result.log.num_particles = options.num_particles;
  result.log.delta = options.kernel.delta;
  result.log.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace longmem
