#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "longmem/rng.hpp"

namespace longmem {

// Liu-West kernel shrinkage settings derived from a discount factor delta:
//   alpha = (3 delta - 1) / (2 delta),   h^2 = 1 - alpha^2.
struct LiuWestConfig {
  double delta = 1.0;
  double alpha = 1.0;
  double h = 0.0;
};

LiuWestConfig config_from_delta(double delta);

// Read-only view of N parameter particles stored row-major (N x dim) with
// normalized weights.
struct ParticleSetView {
  std::span<const double> values;
  std::size_t dim = 0;
  std::span<const double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> row(std::size_t i) const { return values.subspan(i * dim, dim); }
};

struct WeightedParticles {
  std::vector<double> values;
  std::size_t dim = 0;
  std::vector<double> weights;

  ParticleSetView view() const { return {values, dim, weights}; }
};

// Throws DomainError unless the weights are non-negative and sum to one
// within 1e-12 and the value matrix has N * dim entries.
void check_particles(const ParticleSetView& p);

std::vector<double> weighted_mean(const ParticleSetView& p);

// Componentwise sum_i W_i (theta_i - mean)^2.
std::vector<double> weighted_variance(const ParticleSetView& p);

// m_i = alpha theta_i + (1 - alpha) mean, row-major like the input.
std::vector<double> shrink_locations(const ParticleSetView& p, const LiuWestConfig& cfg);

using ParameterDomain = std::function<bool(std::span<const double>)>;

inline constexpr int kKernelMaxAttempts = 100;

// Draw from N(location, h^2 diag(variance)), redrawing the whole vector while
// it falls outside `domain`. Throws DomainError after kKernelMaxAttempts.
std::vector<double> sample_kernel(std::span<const double> location, const LiuWestConfig& cfg,
                                  std::span<const double> variance, Rng& rng,
                                  const ParameterDomain& domain = {});

}  // namespace longmem
