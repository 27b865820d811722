#include "longmem/ssm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "longmem/error.hpp"
#include "longmem/stats.hpp"

namespace longmem {

const char* to_string(ObservationLink link) {
  switch (link) {
    case ObservationLink::kAbs: return "abs";
    case ObservationLink::kExpHalf: return "exp-half";
    case ObservationLink::kAdditive: return "additive";
  }
  return "?";
}

ObservationLink parse_link(const std::string& name) {
  if (name == "abs") return ObservationLink::kAbs;
  if (name == "exp-half") return ObservationLink::kExpHalf;
  if (name == "additive") return ObservationLink::kAdditive;
  throw DomainError("unknown observation link '" + name + "' (expected abs, exp-half, additive)");
}

std::string LearnedParam::name() const {
  return (kind == ParamKind::kAr ? "ar" : "ma") + std::to_string(index + 1);
}

void ModelSpec::validate() const {
  latent.validate();
  if (!(obs_noise_sd > 0.0) || !std::isfinite(obs_noise_sd)) {
    throw DomainError("obs_noise_sd must be positive");
  }
  for (std::size_t i = 0; i < learned.size(); ++i) {
    const auto& p = learned[i];
    const std::size_t order = p.kind == ParamKind::kAr ? latent.ar.size() : latent.ma.size();
    if (p.index >= order) {
      throw DomainError("learned parameter " + p.name() + " exceeds the model order");
    }
    if (!(p.lower <= p.upper) || !std::isfinite(p.lower) || !std::isfinite(p.upper)) {
      throw DomainError("prior box for " + p.name() + " is empty or unbounded");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (learned[j].kind == p.kind && learned[j].index == p.index) {
        throw DomainError("learned parameter " + p.name() + " listed twice");
      }
    }
  }
}

std::vector<std::string> ModelSpec::param_names() const {
  std::vector<std::string> names;
  names.reserve(learned.size());
  for (const auto& p : learned) names.push_back(p.name());
  return names;
}

FarimaSpec ModelSpec::embed(std::span<const double> theta) const {
  if (theta.size() != learned.size()) {
    throw DomainError("parameter vector has wrong dimension");
  }
  FarimaSpec spec = latent;
  for (std::size_t i = 0; i < learned.size(); ++i) {
    auto& target = learned[i].kind == ParamKind::kAr ? spec.ar : spec.ma;
    target.at(learned[i].index) = theta[i];
  }
  return spec;
}

ParameterVector ModelSpec::extract(const FarimaSpec& spec) const {
  ParameterVector theta(learned.size());
  for (std::size_t i = 0; i < learned.size(); ++i) {
    const auto& source = learned[i].kind == ParamKind::kAr ? spec.ar : spec.ma;
    theta[i] = source.at(learned[i].index);
  }
  return theta;
}

bool ModelSpec::in_domain(std::span<const double> theta) const {
  for (double v : theta) {
    if (!std::isfinite(v)) return false;
  }
  return embed(theta).is_valid();
}

ParameterVector sample_prior(const ModelSpec& model, Rng& rng, int max_attempts) {
  ParameterVector theta(model.dim());
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const auto& p = model.learned[i];
      theta[i] = p.lower + (p.upper - p.lower) * rng.uniform();
    }
    if (model.in_domain(theta)) return theta;
  }
  throw DomainError("prior box has no mass inside the stationary/invertible region");
}

double observation_scale(const ModelSpec& model, double x) {
  double s = model.obs_noise_sd;
  switch (model.link) {
    case ObservationLink::kAbs: s *= std::abs(x / 2.0); break;
    case ObservationLink::kExpHalf: s *= std::exp(x / 2.0); break;
    case ObservationLink::kAdditive: break;
  }
  return std::max(s, kMinObsScale);
}

double obs_log_density(const ModelSpec& model, double y, double x) {
  const double scale = observation_scale(model, x);
  const double centre = model.link == ObservationLink::kAdditive ? x : 0.0;
  if (!std::isfinite(scale)) return -std::numeric_limits<double>::infinity();
  return normal_log_pdf(y, centre, scale);
}

double sample_observation(const ModelSpec& model, double x, Rng& rng) {
  const double scale = observation_scale(model, x);
  const double centre = model.link == ObservationLink::kAdditive ? x : 0.0;
  return centre + scale * rng.normal();
}

double transition_log_density(const ModelSpec& model, double x_new,
                              std::span<const double> history, std::span<const double> theta) {
  const FarimaSpec spec = model.embed(theta);
  const auto law = conditional_law(spec, history, model.window);
  return normal_log_pdf(x_new, law.mean, law.sd);
}

double sample_transition(const ModelSpec& model, std::span<const double> history,
                         std::span<const double> theta, Rng& rng) {
  const FarimaSpec spec = model.embed(theta);
  const auto law = conditional_law(spec, history, model.window);
  return law.mean + law.sd * rng.normal();
}

SimulatedData simulate_model(const ModelSpec& model, std::size_t T, std::uint64_t seed,
                             std::size_t truncation) {
  model.validate();
  SimulatedData out;
  out.state = simulate(model.latent, T, seed, truncation);
  out.obs.resize(T);
  Rng rng = Rng::derive(seed, tag(StreamTag::kSimulate), 1);
  for (std::size_t t = 0; t < T; ++t) out.obs[t] = sample_observation(model, out.state[t], rng);
  return out;
}

}  // namespace longmem
