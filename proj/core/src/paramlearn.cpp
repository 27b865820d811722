#include "longmem/paramlearn.hpp"

#include <cmath>
#include <sstream>

#include "longmem/error.hpp"
#include "longmem/stats.hpp"

namespace longmem {

LiuWestConfig config_from_delta(double delta) {
  if (!(delta > 1.0 / 3.0 && delta <= 1.0)) {
    std::ostringstream os;
    os << "discount factor delta = " << delta << " outside (1/3, 1]";
    throw DomainError(os.str());
  }
  const double alpha = (3.0 * delta - 1.0) / (2.0 * delta);
  const double h2 = 1.0 - alpha * alpha;
  return {delta, alpha, std::sqrt(std::max(h2, 0.0))};
}

void check_particles(const ParticleSetView& p) {
  if (p.values.size() != p.size() * p.dim) {
    throw DomainError("particle values do not match N x dim");
  }
  CompensatedSum total;
  for (double w : p.weights) {
    if (!(w >= 0.0)) throw DomainError("negative or NaN particle weight");
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw DomainError("particle weights are not normalized");
}

std::vector<double> weighted_mean(const ParticleSetView& p) {
  std::vector<double> out(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s.add(p.weights[i] * p.values[i * p.dim + k]);
    out[k] = s.value();
  }
  return out;
}

std::vector<double> weighted_variance(const ParticleSetView& p) {
  const auto m = weighted_mean(p);
  std::vector<double> out(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double dev = p.values[i * p.dim + k] - m[k];
      s.add(p.weights[i] * dev * dev);
    }
    out[k] = s.value();
  }
  return out;
}

std::vector<double> shrink_locations(const ParticleSetView& p, const LiuWestConfig& cfg) {
  const auto m = weighted_mean(p);
  std::vector<double> out(p.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = 0; k < p.dim; ++k) {
      out[i * p.dim + k] = cfg.alpha * p.values[i * p.dim + k] + (1.0 - cfg.alpha) * m[k];
    }
  }
  return out;
}

std::vector<double> sample_kernel(std::span<const double> location, const LiuWestConfig& cfg,
                                  std::span<const double> variance, Rng& rng,
                                  const ParameterDomain& domain) {
  if (variance.size() != location.size()) throw DomainError("kernel variance has wrong dimension");
  for (double v : variance) {
    if (!(v >= 0.0)) throw DomainError("kernel variance must be non-negative");
  }
  std::vector<double> draw(location.begin(), location.end());
  if (cfg.h == 0.0) return draw;
  for (int attempt = 0; attempt < kKernelMaxAttempts; ++attempt) {
    for (std::size_t k = 0; k < draw.size(); ++k) {
      draw[k] = location[k] + cfg.h * std::sqrt(variance[k]) * rng.normal();
    }
    if (!domain || domain(draw)) return draw;
  }
  throw DomainError("kernel draw left the parameter domain on every attempt");
}

}  // namespace longmem
