#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace longmem {

// Parameters of a fractional ARIMA(p, d, q) law
//   phi(B) (1 - B)^d X_t = theta(B) eta_t,   eta_t ~ N(0, sigma_eta^2)
// with phi(z) = 1 - ar_1 z - ... - ar_p z^p and theta(z) = 1 + ma_1 z + ... + ma_q z^q.
struct FarimaSpec {
  std::vector<double> ar;
  double d = 0.0;
  std::vector<double> ma;
  double sigma_eta = 1.0;

  // Throws DomainError when d is outside (-0.5, 0.5), sigma_eta <= 0, or the
  // AR / MA polynomials have a root on or inside the unit circle.
  void validate() const;
  bool is_valid() const noexcept;
};

enum class WeightKind { kFracDiff, kFracInt, kArInfinity };

// Power-series coefficients c_0..c_L of one of the operators above.
struct WeightSequence {
  WeightKind kind = WeightKind::kFracDiff;
  std::vector<double> coeffs;

  std::size_t truncation() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double operator[](std::size_t k) const { return coeffs[k]; }
};

// Gaussian one-step law of X_t given its past.
struct ConditionalLaw {
  double mean = 0.0;
  double sd = 1.0;
};

// True when 1 + c_1 z + ... + c_n z^n has every root strictly outside the
// unit circle. Uses the Schur-Cohn step-down recursion.
bool roots_outside_unit_circle(std::span<const double> c);

// pi-weights of (1 - B)^d. Accepts d in (-0.5, 0.5) and the integers 0 and 1.
WeightSequence frac_diff_coeffs(double d, std::size_t L);

// psi-weights of (1 - B)^{-d}, the formal inverse of frac_diff_coeffs(d, L).
WeightSequence frac_int_coeffs(double d, std::size_t L);

// AR(infinity) coefficients of phi(z) (1 - z)^d / theta(z), so that
//   X_t = -sum_{k>=1} c_k X_{t-k} + eta_t.
WeightSequence ar_infinity_coeffs(const FarimaSpec& spec, std::size_t L);

// Same as ar_infinity_coeffs but writes into `out` (resized to L + 1) given
// precomputed pi-weights of length >= L + 1. Skips validation; used on the
// filter hot path where the spec was checked when it was drawn.
void ar_infinity_into(std::span<const double> pi, std::span<const double> ar,
                      std::span<const double> ma, std::size_t L, std::vector<double>& out);

// MA(infinity) coefficients of theta(z) / (phi(z) (1 - z)^d).
WeightSequence ma_infinity_coeffs(const FarimaSpec& spec, std::size_t L);

// Autocovariances gamma(0..K) of ARFIMA(0, d, 0).
std::vector<double> acvf_arfima_0d0(double d, double sigma_eta, std::size_t K);

// Stationary variance gamma(0) of the full ARFIMA(p, d, q) process: squared
// MA(infinity) weights summed to a finite lag plus the hyperbolic tail
// integrated in closed form.
double stationary_variance(const FarimaSpec& spec);

// Burn-in used by simulate for a given psi truncation.
std::size_t simulation_burn_in(std::size_t truncation);

// Path x_1..x_T: ARMA recursion driven by N(0, sigma_eta^2) noise, then
// fractional integration with psi-weights truncated at `truncation`. The first
// simulation_burn_in(truncation) values are discarded.
std::vector<double> simulate(const FarimaSpec& spec, std::size_t T, std::uint64_t seed,
                             std::size_t truncation = 1000);

// Conditional law of X_t given x_1..x_{t-1} (history in time order). With
// `window` set only the most recent `window` values enter the mean. Empty
// history gives the stationary law N(0, stationary_variance(spec)).
ConditionalLaw conditional_law(const FarimaSpec& spec, std::span<const double> history,
                               std::optional<std::size_t> window = std::nullopt);

// -sum_{k=1}^{m} c_k x_{t-k} with m = min(window, history size, c size - 1).
double conditional_mean(std::span<const double> ar_inf, std::span<const double> history,
                        std::optional<std::size_t> window = std::nullopt);

// Exact Gaussian prediction of the next value of a zero-mean stationary process
// with autocovariances acvf[0..] from the finite past `history` (time order).
// Requires acvf.size() > history.size(). Throws NumericalError when the
// Toeplitz system is not positive definite.
ConditionalLaw durbin_levinson_law(std::span<const double> acvf, std::span<const double> history);

}  // namespace longmem
