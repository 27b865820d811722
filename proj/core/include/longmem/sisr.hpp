#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "longmem/fracproc.hpp"
#include "longmem/paramlearn.hpp"
#include "longmem/rng.hpp"
#include "longmem/ssm.hpp"

namespace longmem {

enum class ResampleScheme { kMultinomial, kSystematic };

struct ResamplePolicy {
  ResampleScheme scheme = ResampleScheme::kMultinomial;
  // false: resample only when ESS < ess_threshold * N.
  bool every_step = true;
  double ess_threshold = 0.5;
};

// Importance proposal q_t. The transition law of the particle is passed in so
// proposals never repeat the O(t) conditioning work. Without a proposal the
// filter uses the transition itself (bootstrap filter).
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual double sample(const ConditionalLaw& transition, double y, const ModelSpec& model,
                        Rng& rng) const = 0;
  virtual double log_density(double x, const ConditionalLaw& transition, double y,
                             const ModelSpec& model) const = 0;
};

struct FilterOptions {
  std::size_t num_particles = 500;
  LiuWestConfig kernel = config_from_delta(1.0);
  ResamplePolicy resample;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = all cores; output does not depend on it
  std::shared_ptr<const Proposal> proposal;
};

struct ParticleCloud {
  std::size_t t = 0;  // observations assimilated so far
  std::vector<std::vector<double>> trajectories;  // N paths x_1..x_t
  std::vector<double> log_weights;   // raw log-weights of the last step
  std::vector<double> norm_weights;  // W_t, sum to one
  std::vector<double> params;        // N x dim, row-major
  std::size_t dim = 0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return norm_weights.size(); }
  ParticleSetView param_view() const { return {params, dim, norm_weights}; }
  std::span<const double> theta(std::size_t i) const {
    return std::span<const double>(params).subspan(i * dim, dim);
  }
  // Throws NumericalError when a structural invariant is broken.
  void check_invariants() const;
};

struct FilterSnapshot {
  std::size_t t = 0;
  double state_mean = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  std::vector<double> theta_bar;
  std::vector<double> theta_var;
  double ess = 0.0;
  double log_likelihood_increment = 0.0;
  double obs_scale_mean = 0.0;  // posterior mean of the observation scale
  bool resampled = false;
};

double ess(std::span<const double> weights);

// Normalizes log-weights into `out` after max-subtraction and returns
// log(sum exp(log_weights)). Throws TotalWeightUnderflow when the largest
// log-weight is below -745 or not finite.
double normalize_log_weights(std::span<const double> log_weights, std::vector<double>& out);

std::vector<std::size_t> multinomial_resample(std::span<const double> weights, Rng& rng);
std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng);

// Sequential importance sampling with resampling over full trajectories, with
// Liu-West kernel moves on the learned parameters.
class SisrFilter {
 public:
  SisrFilter(ModelSpec model, FilterOptions options);

  // Time 1: theta ~ prior box, x_1 ~ stationary law, weight, resample.
  FilterSnapshot init(double y1);
  // Time t >= 2. Requires init().
  FilterSnapshot step(double y);

  const ParticleCloud& cloud() const noexcept { return cloud_; }
  const ModelSpec& model() const noexcept { return model_; }
  const FilterOptions& options() const noexcept { return options_; }

 private:
  FilterSnapshot finish_step(bool previous_uniform, std::span<const double> prev_weights);
  void resample_now(Rng& rng);
  void grow_pi(std::size_t length);

  ModelSpec model_;
  FilterOptions options_;
  ParticleCloud cloud_;
  std::vector<double> pi_;  // fractional differencing weights, grown on demand
  std::vector<std::vector<double>> spare_;
  std::vector<double> spare_params_;
  std::vector<double> loglik_;
  bool initialized_ = false;
  bool uniform_ = false;  // norm_weights are exactly 1/N
};

struct RunLog {
  std::uint64_t seed = 0;
  std::size_t num_particles = 0;
  double delta = 1.0;
  double elapsed_seconds = 0.0;
};

struct RunResult {
  std::vector<FilterSnapshot> snapshots;
  ParticleCloud cloud;
  RunLog log;
};

// init on y[0] then one step per remaining observation.
RunResult run(const ModelSpec& model, std::span<const double> observations,
              const FilterOptions& options);

}  // namespace longmem
