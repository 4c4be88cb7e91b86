#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace risim {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

// Deterministic, decorrelated generator for substream (seed, index, tag).
// Every random quantity in the simulator is drawn from such a substream so a
// single realization can be replayed without regenerating the ones before it.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag);

// Derived master seed for an independent purpose (train vs test corpus, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

namespace stream_tag {
inline constexpr std::uint64_t kDirect = 0;
inline constexpr std::uint64_t incident(std::size_t m) { return 1 + 2 * m; }
inline constexpr std::uint64_t reflect(std::size_t m) { return 2 + 2 * m; }
inline constexpr std::uint64_t kRxPosition = 1000;
inline constexpr std::uint64_t kRandomBaseline = 1001;
inline constexpr std::uint64_t kShuffle = 2000;
inline constexpr std::uint64_t kInit = 2001;
inline constexpr std::uint64_t kTrainData = 3000;
inline constexpr std::uint64_t kTestData = 3001;
}  // namespace stream_tag

// CN(0, variance): independent real/imaginary parts N(0, variance/2).
std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance);

}  // namespace risim
