#include "risim/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace risim {

namespace {

bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  require(n > 0.0 && std::isfinite(n), "normalized: zero or non finite vector");
  return (1.0 / n) * a;
}

RadiationPattern RadiationPattern::cosine_power(double n) {
  require(std::isfinite(n) && n >= 0.0, "radiation pattern: exponent must be >= 0");
  return {Kind::CosinePower, n};
}

double RadiationPattern::gain(double elevation) const {
  if (kind == Kind::Isotropic) return 1.0;
  const double c = std::cos(elevation);
  if (c <= 0.0) return 0.0;
  return std::pow(c, exponent);
}

void RisGeometry::validate() const {
  require(rows >= 1 && cols >= 1, "ris geometry: empty grid");
  require(std::isfinite(spacing_wavelengths) && spacing_wavelengths > 0.0,
          "ris geometry: spacing must be positive");
  require(finite(normal) && finite(up), "ris geometry: non finite axes");
  require(std::abs(norm(normal) - 1.0) < 1e-9, "ris geometry: normal must be unit");
  require(std::abs(norm(up) - 1.0) < 1e-9, "ris geometry: up must be unit");
  require(std::abs(dot(normal, up)) < 1e-9, "ris geometry: axes must be orthogonal");
}

Aoa aoa_from(const RisSite& site, const Vec3& point) {
  const Vec3 u = normalized(point - site.center);
  const double se = std::clamp(dot(u, site.geometry.up), -1.0, 1.0);
  return {std::atan2(dot(u, site.geometry.azimuth_axis()), dot(u, site.geometry.normal)),
          std::asin(se)};
}

Vec3 Scene::element_position(std::size_t m, std::size_t k) const {
  if (m >= ris.size()) throw std::out_of_range("element_position: ris index");
  const RisSite& site = ris[m];
  const RisGeometry& geom = site.geometry;
  if (k >= geom.num_elements()) throw std::out_of_range("element_position: element index");
  const double d = geom.spacing_wavelengths * wavelength();
  const double p = static_cast<double>(k / geom.cols) - 0.5 * static_cast<double>(geom.rows - 1);
  const double q = static_cast<double>(k % geom.cols) - 0.5 * static_cast<double>(geom.cols - 1);
  return site.center + d * p * geom.azimuth_axis() + d * q * geom.up;
}

void Scene::validate() const {
  require(!ris.empty(), "scene: needs at least one ris");
  require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "scene: carrier must be positive");
  require(std::isfinite(pathloss_exponent_ris) && pathloss_exponent_ris > 0.0,
          "scene: ris pathloss exponent must be positive");
  require(std::isfinite(pathloss_exponent_direct) && pathloss_exponent_direct > 0.0,
          "scene: direct pathloss exponent must be positive");
  require(std::isfinite(direct_penetration_loss_db) && direct_penetration_loss_db >= 0.0,
          "scene: penetration loss must be >= 0 dB");
  require(finite(tx) && finite(rx), "scene: non finite terminal position");
  require(norm(tx - rx) > 0.0, "scene: tx and rx coincide");
  for (const RisSite& site : ris) {
    site.geometry.validate();
    require(finite(site.center), "scene: non finite ris position");
    require(norm(site.center - tx) > 0.0, "scene: ris placed on tx");
    require(norm(site.center - rx) > 0.0, "scene: ris placed on rx");
  }
}

std::size_t ClusterConfig::total_rays() const {
  std::size_t s = 0;
  for (std::size_t r : rays_per_cluster) s += r;
  return s;
}

void ClusterConfig::validate() const {
  require(rays_per_cluster.size() == num_clusters, "clusters: rays_per_cluster size mismatch");
  for (std::size_t r : rays_per_cluster) require(r >= 1, "clusters: empty cluster");
  require(std::isfinite(intra_cluster_spread) && intra_cluster_spread >= 0.0,
          "clusters: spread must be >= 0");
  require(azimuth_center_min <= azimuth_center_max, "clusters: azimuth range inverted");
  require(elevation_center_min <= elevation_center_max, "clusters: elevation range inverted");
  require(los_probability >= 0.0 && los_probability <= 1.0,
          "clusters: los probability outside [0,1]");
}

}  // namespace risim
