#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "risim/geometry.hpp"

namespace risim {

using cd = std::complex<double>;

// Free space reference loss at 1 m times d^-exponent.
double pathloss(double distance_m, double exponent, double carrier_hz);

// Planar array response for a far field direction, unit modulus entries,
// element (p, q) carrying phase 2*pi*spacing*(p*cos(el)*sin(az) + q*sin(el)).
std::vector<cd> steering_vector(const RisGeometry& geom, double azimuth, double elevation);

struct ChannelRealization {
  std::vector<std::vector<cd>> h;  // incident TX -> RIS m, length K each
  std::vector<std::vector<cd>> g;  // reflect RIS m -> RX
  cd h0 = 0.0;                     // direct TX -> RX
};

// RIS m -> RX reflect channel: pure LOS with a random common phase.
std::vector<cd> sample_g(const Scene& scene, std::size_t m, std::mt19937_64& rng);

// TX -> RIS m incident channel: clustered NLOS rays plus an optional LOS term.
// Draw order per realization is fixed: for each cluster its center azimuth and
// elevation, then per ray the two angle offsets and the complex gain; after all
// clusters the LOS indicator and the LOS phase.
std::vector<cd> sample_h(const Scene& scene, std::size_t m, const ClusterConfig& clusters,
                         std::mt19937_64& rng);

// TX -> RX direct channel: CN(0, L(d) * 10^(-loss_db/10)).
cd sample_direct(const Scene& scene, std::mt19937_64& rng);

// All links of one realization, drawn from per-link substreams of (seed, index).
ChannelRealization sample_realization(const Scene& scene, const ClusterConfig& clusters,
                                      std::uint64_t seed, std::uint64_t index);

}  // namespace risim
