#pragma once

#include <cstdint>
#include <limits>

namespace longmem {

// SplitMix64 generator. Small state makes it cheap to derive one independent
// stream per (seed, time, particle) triple, which is what keeps filter output
// independent of the number of worker threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  // Stream keyed by a seed and up to three stream coordinates.
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept;

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Stream purposes used when deriving per-step generators.
enum class StreamTag : std::uint64_t {
  kInitState = 1,
  kInitTheta = 2,
  kPropagate = 3,
  kKernel = 4,
  kResample = 5,
  kForecast = 6,
  kSimulate = 7,
};

inline std::uint64_t tag(StreamTag t) noexcept { return static_cast<std::uint64_t>(t); }

}  // namespace longmem
