#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longmem/fracproc.hpp"
#include "longmem/rng.hpp"

namespace longmem {

// sigma(.) in Y_t = sigma(X_t / 2) * obs_noise_sd * eps_t.
//   kAbs      sigma(u) = |u|
//   kExpHalf  sigma(u) = exp(u), i.e. the usual exp(X_t / 2) volatility scale
//   kAdditive Y_t = X_t + obs_noise_sd * eps_t (linear-Gaussian test model)
enum class ObservationLink { kAbs, kExpHalf, kAdditive };

const char* to_string(ObservationLink link);
ObservationLink parse_link(const std::string& name);

// Observation scales below this are floored so weights stay finite at x = 0.
inline constexpr double kMinObsScale = 1e-6;

enum class ParamKind { kAr, kMa };

// One learned coefficient of the latent law and its uniform prior box.
struct LearnedParam {
  ParamKind kind = ParamKind::kAr;
  std::size_t index = 0;  // 0-based lag index into FarimaSpec::ar / ma
  double lower = -1.0;
  double upper = 1.0;

  std::string name() const;  // "ar1", "ma2", ...
};

// Values of the learned components, in ModelSpec::learned order.
using ParameterVector = std::vector<double>;

struct ModelSpec {
  FarimaSpec latent;                 // fixed values; learned slots are overwritten
  std::vector<LearnedParam> learned;
  ObservationLink link = ObservationLink::kAbs;
  double obs_noise_sd = 1.0;
  std::optional<std::size_t> window;  // conditioning window; nullopt = full history

  void validate() const;
  std::size_t dim() const noexcept { return learned.size(); }
  std::vector<std::string> param_names() const;

  FarimaSpec embed(std::span<const double> theta) const;
  ParameterVector extract(const FarimaSpec& spec) const;
  ParameterVector fixed_theta() const { return extract(latent); }

  // Stationarity / invertibility of the embedded law.
  bool in_domain(std::span<const double> theta) const;
};

// Uniform draw on the prior box, rejected until in_domain. Throws DomainError
// after max_attempts.
ParameterVector sample_prior(const ModelSpec& model, Rng& rng, int max_attempts = 100);

double observation_scale(const ModelSpec& model, double x);

double obs_log_density(const ModelSpec& model, double y, double x);

double sample_observation(const ModelSpec& model, double x, Rng& rng);

double transition_log_density(const ModelSpec& model, double x_new,
                              std::span<const double> history, std::span<const double> theta);

double sample_transition(const ModelSpec& model, std::span<const double> history,
                         std::span<const double> theta, Rng& rng);

// Latent path then observations, both from one seed.
struct SimulatedData {
  std::vector<double> state;
  std::vector<double> obs;
};
SimulatedData simulate_model(const ModelSpec& model, std::size_t T, std::uint64_t seed,
                             std::size_t truncation = 2048);

}  // namespace longmem
