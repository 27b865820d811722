#include "longmem/fracproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "longmem/error.hpp"
#include "longmem/rng.hpp"

namespace longmem {
namespace {

constexpr std::size_t kVarianceLags = 20000;

bool in_open_range(double d) { return d > -0.5 && d < 0.5; }

void require_fractional_range(double d, const char* who) {
  if (!in_open_range(d)) {
    std::ostringstream os;
    os << who << ": d = " << d << " outside (-0.5, 0.5)";
    throw DomainError(os.str());
  }
}

std::vector<double> pi_weights(double d, std::size_t L) {
  std::vector<double> c(L + 1);
  c[0] = 1.0;
  for (std::size_t k = 1; k <= L; ++k) {
    const double kk = static_cast<double>(k);
    c[k] = c[k - 1] * (kk - 1.0 - d) / kk;
  }
  return c;
}

std::vector<double> negated(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
  return out;
}

}  // namespace

bool roots_outside_unit_circle(std::span<const double> c) {
  // Work with the AR form 1 - a_1 z - ... - a_n z^n, a_k = -c_k, and step down
  // the Levinson recursion; stable iff every reflection coefficient is < 1.
  std::vector<double> a = negated(c);
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  for (std::size_t k = a.size(); k > 0; --k) {
    const double kappa = a[k - 1];
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) return false;
    const double denom = 1.0 - kappa * kappa;
    std::vector<double> lower(k - 1);
    for (std::size_t j = 0; j + 1 < k; ++j) {
      lower[j] = (a[j] + kappa * a[k - 2 - j]) / denom;
    }
    a = std::move(lower);
  }
  return true;
}

void FarimaSpec::validate() const {
  std::ostringstream os;
  if (!in_open_range(d)) {
    os << "memory parameter d = " << d << " outside (-0.5, 0.5)";
  } else if (!(sigma_eta > 0.0) || !std::isfinite(sigma_eta)) {
    os << "innovation sd sigma_eta = " << sigma_eta << " must be positive";
  } else if (!roots_outside_unit_circle(negated(ar))) {
    os << "AR polynomial is not stationary";
  } else if (!roots_outside_unit_circle(ma)) {
    os << "MA polynomial is not invertible";
  } else {
    return;
  }
  throw DomainError(os.str());
}

bool FarimaSpec::is_valid() const noexcept {
  return in_open_range(d) && sigma_eta > 0.0 && std::isfinite(sigma_eta) &&
         roots_outside_unit_circle(negated(ar)) && roots_outside_unit_circle(ma);
}

WeightSequence frac_diff_coeffs(double d, std::size_t L) {
  if (!(in_open_range(d) || d == 0.0 || d == 1.0)) {
    std::ostringstream os;
    os << "frac_diff_coeffs: d = " << d << " outside (-0.5, 0.5) and not in {0, 1}";
    throw DomainError(os.str());
  }
  return {WeightKind::kFracDiff, pi_weights(d, L)};
}

WeightSequence frac_int_coeffs(double d, std::size_t L) {
  require_fractional_range(d, "frac_int_coeffs");
  return {WeightKind::kFracInt, pi_weights(-d, L)};
}

void ar_infinity_into(std::span<const double> pi, std::span<const double> ar,
                      std::span<const double> ma, std::size_t L, std::vector<double>& out) {
  out.resize(L + 1);
  for (std::size_t k = 0; k <= L; ++k) {
    double acc = pi[k];
    const std::size_t pmax = std::min(ar.size(), k);
    for (std::size_t j = 1; j <= pmax; ++j) acc -= ar[j - 1] * pi[k - j];
    const std::size_t qmax = std::min(ma.size(), k);
    for (std::size_t j = 1; j <= qmax; ++j) acc -= ma[j - 1] * out[k - j];
    out[k] = acc;
  }
}

WeightSequence ar_infinity_coeffs(const FarimaSpec& spec, std::size_t L) {
  spec.validate();
  const auto pi = pi_weights(spec.d, L);
  WeightSequence w{WeightKind::kArInfinity, {}};
  ar_infinity_into(pi, spec.ar, spec.ma, L, w.coeffs);
  return w;
}

WeightSequence ma_infinity_coeffs(const FarimaSpec& spec, std::size_t L) {
  spec.validate();
  const auto psi_frac = pi_weights(-spec.d, L);
  std::vector<double> psi(L + 1);
  for (std::size_t k = 0; k <= L; ++k) {
    double acc = psi_frac[k];
    const std::size_t qmax = std::min(spec.ma.size(), k);
    for (std::size_t j = 1; j <= qmax; ++j) acc += spec.ma[j - 1] * psi_frac[k - j];
    const std::size_t pmax = std::min(spec.ar.size(), k);
    for (std::size_t j = 1; j <= pmax; ++j) acc += spec.ar[j - 1] * psi[k - j];
    psi[k] = acc;
  }
  return {WeightKind::kFracInt, std::move(psi)};
}

std::vector<double> acvf_arfima_0d0(double d, double sigma_eta, std::size_t K) {
  require_fractional_range(d, "acvf_arfima_0d0");
  if (!(sigma_eta > 0.0)) throw DomainError("acvf_arfima_0d0: sigma_eta must be positive");
  std::vector<double> g(K + 1);
  g[0] = sigma_eta * sigma_eta * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (std::size_t k = 1; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    g[k] = g[k - 1] * (kk - 1.0 + d) / (kk - d);
  }
  return g;
}

double stationary_variance(const FarimaSpec& spec) {
  const auto psi = ma_infinity_coeffs(spec, kVarianceLags);
  double sum = 0.0;
  // Smallest terms first.
  for (std::size_t k = psi.coeffs.size(); k-- > 0;) sum += psi[k] * psi[k];
  if (spec.d != 0.0) {
    // psi_k ~ theta(1) / phi(1) * k^{d-1} / Gamma(d) for large k.
    double theta1 = 1.0, phi1 = 1.0;
    for (double m : spec.ma) theta1 += m;
    for (double a : spec.ar) phi1 -= a;
    const double scale = theta1 / (phi1 * std::tgamma(spec.d));
    const double J = static_cast<double>(kVarianceLags) + 0.5;
    sum += scale * scale * std::pow(J, 2.0 * spec.d - 1.0) / (1.0 - 2.0 * spec.d);
  }
  return spec.sigma_eta * spec.sigma_eta * sum;
}

std::size_t simulation_burn_in(std::size_t truncation) {
  return std::max<std::size_t>(2000, 10 * truncation);
}

std::vector<double> simulate(const FarimaSpec& spec, std::size_t T, std::uint64_t seed,
                             std::size_t truncation) {
  spec.validate();
  const std::size_t L = truncation;
  const std::size_t burn = simulation_burn_in(L);
  const std::size_t total = L + burn + T;
  Rng rng = Rng::derive(seed, tag(StreamTag::kSimulate));

  std::vector<double> eta(total);
  for (auto& e : eta) e = spec.sigma_eta * rng.normal();

  std::vector<double> w(total, 0.0);
  for (std::size_t s = 0; s < total; ++s) {
    double acc = eta[s];
    for (std::size_t j = 1; j <= spec.ar.size() && j <= s; ++j) acc += spec.ar[j - 1] * w[s - j];
    for (std::size_t j = 1; j <= spec.ma.size() && j <= s; ++j) acc += spec.ma[j - 1] * eta[s - j];
    w[s] = acc;
  }

  const auto psi = pi_weights(-spec.d, L);
  std::vector<double> x(T);
  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t s = L + burn + i;
    double acc = 0.0;
    for (std::size_t k = 0; k <= L; ++k) acc += psi[k] * w[s - k];
    x[i] = acc;
  }
  return x;
}

double conditional_mean(std::span<const double> ar_inf, std::span<const double> history,
                        std::optional<std::size_t> window) {
  std::size_t m = history.size();
  if (window) m = std::min(m, *window);
  if (!ar_inf.empty()) m = std::min(m, ar_inf.size() - 1);
  const double* last = history.data() + history.size();
  double acc = 0.0;
  for (std::size_t k = 1; k <= m; ++k) acc += ar_inf[k] * last[-static_cast<std::ptrdiff_t>(k)];
  return -acc;
}

ConditionalLaw conditional_law(const FarimaSpec& spec, std::span<const double> history,
                               std::optional<std::size_t> window) {
  spec.validate();
  if (history.empty() || (window && *window == 0)) {
    return {0.0, std::sqrt(stationary_variance(spec))};
  }
  std::size_t m = history.size();
  if (window) m = std::min(m, *window);
  const auto c = ar_infinity_coeffs(spec, m);
  return {conditional_mean(c.coeffs, history, window), spec.sigma_eta};
}

ConditionalLaw durbin_levinson_law(std::span<const double> acvf, std::span<const double> history) {
  const std::size_t n = history.size();
  if (acvf.size() < n + 1) {
    throw DomainError("durbin_levinson_law: need acvf up to lag history.size()");
  }
  if (!(acvf[0] > 0.0)) throw NumericalError("durbin_levinson_law: gamma(0) must be positive");
  if (n == 0) return {0.0, std::sqrt(acvf[0])};

  std::vector<double> phi(n, 0.0), prev(n, 0.0);
  double v = acvf[0];
  for (std::size_t k = 1; k <= n; ++k) {
    double num = acvf[k];
    for (std::size_t j = 1; j < k; ++j) num -= prev[j - 1] * acvf[k - j];
    const double kappa = num / v;
    phi[k - 1] = kappa;
    for (std::size_t j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
    v *= 1.0 - kappa * kappa;
    if (!(v > 0.0)) {
      throw NumericalError("durbin_levinson_law: Toeplitz system is not positive definite");
    }
    std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k), prev.begin());
  }
  double mean = 0.0;
  for (std::size_t j = 1; j <= n; ++j) mean += phi[j - 1] * history[n - j];
  return {mean, std::sqrt(v)};
}

}  // namespace longmem
