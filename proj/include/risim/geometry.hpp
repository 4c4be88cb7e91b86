#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace risim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 normalized(const Vec3& a);

// Element radiation pattern, rotationally symmetric around the surface normal.
// CosinePower models G(theta) = cos(theta)^n on the front half space and 0 behind.
struct RadiationPattern {
  enum class Kind { Isotropic, CosinePower };
  Kind kind = Kind::Isotropic;
  double exponent = 0.0;

  static RadiationPattern isotropic() { return {}; }
  static RadiationPattern cosine_power(double n);
  double gain(double elevation) const;
};

// Rectangular element grid centered on the site position. Index p in [0, rows)
// advances along azimuth_axis() = cross(up, normal), index q in [0, cols)
// along up. Elements are flattened row major: k = p * cols + q.
struct RisGeometry {
  std::size_t rows = 8;
  std::size_t cols = 8;
  double spacing_wavelengths = 0.5;
  Vec3 normal{1.0, 0.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};

  std::size_t num_elements() const { return rows * cols; }
  Vec3 azimuth_axis() const { return cross(up, normal); }
  void validate() const;
};

struct RisSite {
  Vec3 center;
  RisGeometry geometry;
};

// Direction of a far point in a site's local frame. Azimuth is measured in the
// normal/azimuth_axis plane, elevation towards up.
struct Aoa {
  double azimuth = 0.0;
  double elevation = 0.0;
};

Aoa aoa_from(const RisSite& site, const Vec3& point);

struct Scene {
  Vec3 tx;
  Vec3 rx;
  std::vector<RisSite> ris;
  double carrier_hz = 3.5e9;
  double pathloss_exponent_ris = 2.0;
  double pathloss_exponent_direct = 3.5;
  double direct_penetration_loss_db = 0.0;
  RadiationPattern pattern{};

  std::size_t num_ris() const { return ris.size(); }
  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  Vec3 element_position(std::size_t m, std::size_t k) const;
  void validate() const;
};

// Clustered scattering geometry for the TX-to-RIS link.
struct ClusterConfig {
  std::size_t num_clusters = 3;
  std::vector<std::size_t> rays_per_cluster = {8, 8, 8};
  double azimuth_center_min = -kPi / 2;
  double azimuth_center_max = kPi / 2;
  double elevation_center_min = -kPi / 4;
  double elevation_center_max = kPi / 4;
  double intra_cluster_spread = deg2rad(5.0);
  double los_probability = 1.0;

  std::size_t total_rays() const;
  void validate() const;
};

}  // namespace risim
