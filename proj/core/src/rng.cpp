#include "longmem/rng.hpp"

#include <random>

namespace longmem {
namespace {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
  h = mix(h ^ (a + 0x632be59bd9b4e019ULL));
  h = mix(h ^ (b + 0x85ebca77c2b2ae63ULL));
  h = mix(h ^ (c + 0xc2b2ae3d27d4eb4fULL));
  return Rng(h);
}

double Rng::normal() noexcept {
  std::normal_distribution<double> n01(0.0, 1.0);
  return n01(*this);
}

}  // namespace longmem
