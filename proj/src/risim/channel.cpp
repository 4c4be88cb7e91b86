#include "risim/channel.hpp"

#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

double pathloss(double distance_m, double exponent, double carrier_hz) {
  if (!(std::isfinite(distance_m) && distance_m > 0.0))
    throw std::domain_error("pathloss: distance must be positive");
  if (!(std::isfinite(exponent) && exponent > 0.0))
    throw std::domain_error("pathloss: exponent must be positive");
  if (!(std::isfinite(carrier_hz) && carrier_hz > 0.0))
    throw std::domain_error("pathloss: carrier must be positive");
  const double lref = kSpeedOfLight / (4.0 * kPi * carrier_hz);
  return lref * lref * std::pow(distance_m, -exponent);
}

std::vector<cd> steering_vector(const RisGeometry& geom, double azimuth, double elevation) {
  if (!(std::isfinite(azimuth) && std::isfinite(elevation)))
    throw std::domain_error("steering_vector: non finite angle");
  geom.validate();
  const double az_step = 2.0 * kPi * geom.spacing_wavelengths * std::cos(elevation) * std::sin(azimuth);
  const double el_step = 2.0 * kPi * geom.spacing_wavelengths * std::sin(elevation);
  std::vector<cd> out(geom.num_elements());
  for (std::size_t p = 0; p < geom.rows; ++p) {
    for (std::size_t q = 0; q < geom.cols; ++q) {
      out[p * geom.cols + q] =
          std::polar(1.0, static_cast<double>(p) * az_step + static_cast<double>(q) * el_step);
    }
  }
  return out;
}

std::vector<cd> sample_g(const Scene& scene, std::size_t m, std::mt19937_64& rng) {
  const RisSite& site = scene.ris.at(m);
  const double d = norm(scene.rx - site.center);
  const Aoa ang = aoa_from(site, scene.rx);
  const double amp =
      std::sqrt(scene.pattern.gain(ang.elevation) * pathloss(d, scene.pathloss_exponent_ris, scene.carrier_hz));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const cd common = std::polar(amp, phase(rng));
  std::vector<cd> out = steering_vector(site.geometry, ang.azimuth, ang.elevation);
  for (cd& v : out) v *= common;
  return out;
}

std::vector<cd> sample_h(const Scene& scene, std::size_t m, const ClusterConfig& clusters,
                         std::mt19937_64& rng) {
  clusters.validate();
  const RisSite& site = scene.ris.at(m);
  const double loss =
      pathloss(norm(scene.tx - site.center), scene.pathloss_exponent_ris, scene.carrier_hz);
  const std::size_t k = site.geometry.num_elements();
  std::uniform_real_distribution<double> u_az(clusters.azimuth_center_min, clusters.azimuth_center_max);
  std::uniform_real_distribution<double> u_el(clusters.elevation_center_min, clusters.elevation_center_max);
  std::normal_distribution<double> offset(0.0, clusters.intra_cluster_spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

  std::vector<cd> acc(k, cd(0.0, 0.0));
  for (std::size_t c = 0; c < clusters.num_clusters; ++c) {
    const double caz = u_az(rng);
    const double cel = u_el(rng);
    for (std::size_t r = 0; r < clusters.rays_per_cluster[c]; ++r) {
      const double raz = caz + offset(rng);
      const double rel = cel + offset(rng);
      const cd alpha = complex_gaussian(rng, 1.0);
      const cd w = alpha * std::sqrt(scene.pattern.gain(rel) * loss);
      const std::vector<cd> sv = steering_vector(site.geometry, raz, rel);
      for (std::size_t i = 0; i < k; ++i) acc[i] += w * sv[i];
    }
  }
  const std::size_t total = clusters.total_rays();
  if (total > 0) {
    const double kappa = 1.0 / std::sqrt(static_cast<double>(total));
    for (cd& v : acc) v *= kappa;
  }

  const bool los = unit(rng) < clusters.los_probability;
  const double eta = phase(rng);
  if (los) {
    const Aoa ang = aoa_from(site, scene.tx);
    const cd w = std::polar(std::sqrt(scene.pattern.gain(ang.elevation) * loss), eta);
    const std::vector<cd> sv = steering_vector(site.geometry, ang.azimuth, ang.elevation);
    for (std::size_t i = 0; i < k; ++i) acc[i] += w * sv[i];
  }
  return acc;
}

cd sample_direct(const Scene& scene, std::mt19937_64& rng) {
  const double d = norm(scene.tx - scene.rx);
  const double var = pathloss(d, scene.pathloss_exponent_direct, scene.carrier_hz) *
                     std::pow(10.0, -scene.direct_penetration_loss_db / 10.0);
  return complex_gaussian(rng, var);
}

ChannelRealization sample_realization(const Scene& scene, const ClusterConfig& clusters,
                                      std::uint64_t seed, std::uint64_t index) {
  scene.validate();
  clusters.validate();
  ChannelRealization out;
  out.h.resize(scene.num_ris());
  out.g.resize(scene.num_ris());
  for (std::size_t m = 0; m < scene.num_ris(); ++m) {
    std::mt19937_64 rng_h = substream(seed, index, stream_tag::incident(m));
    out.h[m] = sample_h(scene, m, clusters, rng_h);
    std::mt19937_64 rng_g = substream(seed, index, stream_tag::reflect(m));
    out.g[m] = sample_g(scene, m, rng_g);
  }
  std::mt19937_64 rng_d = substream(seed, index, stream_tag::kDirect);
  out.h0 = sample_direct(scene, rng_d);
  return out;
}

}  // namespace risim
