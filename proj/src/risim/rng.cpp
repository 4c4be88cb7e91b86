#include "risim/rng.hpp"

namespace risim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ mix64(index + 0xD1B54A32D192ED03ULL));
  s = mix64(s ^ mix64(tag + 0x8CB92BA72F3D8DD7ULL));
  return std::mt19937_64(s);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) ^ mix64(tag + 0xA0761D6478BD642FULL));
}

std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace risim
